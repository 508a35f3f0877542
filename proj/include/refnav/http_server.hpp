#pragma once

#include <string>

#include <httplib.h>

#include "refnav/service.hpp"

namespace refnav {

/// Routes every GET/POST on `server` to `service`.
inline void mount(httplib::Server& server, Service& service) {
  auto adapt = [&service](const httplib::Request& req, httplib::Response& res) {
    ApiRequest api{req.method, req.path, {}, req.body};
    for (const auto& [k, v] : req.params) api.params.emplace(k, v);
    auto out = service.handle(api);
    res.status = out.status;
    res.set_content(out.body.dump(2) + "\n", "application/json");
  };
  server.Get(".*", adapt);
  server.Post(".*", adapt);
}

}  // namespace refnav
