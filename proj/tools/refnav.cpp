// refnav: batch indexing, search and graph export, plus the HTTP service.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "refnav/http_server.hpp"
#include "refnav/refnav.hpp"

namespace {

using namespace refnav;

struct Options {
  std::string corpus;
  std::string thesaurus;
  std::string categories;
  std::size_t mosaic_size = 12;
  std::size_t graph_k = 8;
  double edge_threshold = 0.3;
  std::size_t graph_seed_count = 10;
  double alpha = 1.0;
  double beta = 0.75;
  double gamma = 0.25;
  bool idf = false;
};

std::shared_ptr<const Thesaurus> open_thesaurus(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open thesaurus '" + path + "'");
  return std::make_shared<const Thesaurus>(load_thesaurus(in));
}

std::shared_ptr<const Corpus> open_corpus(const std::string& path, const Thesaurus& th) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open corpus '" + path + "'");
  return std::make_shared<const Corpus>(ingest_corpus(in, th));
}

Restriction restriction_of(const std::string& csv) {
  if (csv.empty()) return Restriction::all();
  std::set<std::string> cats;
  std::stringstream ss(csv);
  for (std::string c; std::getline(ss, c, ',');) {
    if (!c.empty()) cats.insert(c);
  }
  return Restriction::only(std::move(cats));
}

SessionConfig session_config(const Options& o) {
  SessionConfig c;
  c.restriction = restriction_of(o.categories);
  c.mosaic_size = o.mosaic_size;
  c.graph_k = o.graph_k;
  c.edge_threshold = o.edge_threshold;
  c.graph_seed_count = o.graph_seed_count;
  c.rocchio = {o.alpha, o.beta, o.gamma};
  c.weighting = o.idf ? Weighting::StarsIdf : Weighting::Stars;
  return c;
}

Vectorizer make_vectorizer(const Options& o, const Thesaurus& th, const Corpus& corpus) {
  auto r = restriction_of(o.categories);
  return o.idf ? Vectorizer(th, r, corpus) : Vectorizer(th, r);
}

/// Parses `term:weight` pairs and validates them like index entries.
TermVector query_from_terms(const std::vector<std::string>& pairs, const Thesaurus& th) {
  ImageRecord probe;
  probe.id = "<query>";
  for (const auto& p : pairs) {
    auto colon = p.rfind(':');
    if (colon == std::string::npos || colon == 0) {
      throw Error(ErrorCode::InvalidArgument, "expected term:weight, got '" + p + "'");
    }
    long long weight = 0;
    try {
      std::size_t pos = 0;
      weight = std::stoll(p.substr(colon + 1), &pos);
      if (pos != p.size() - colon - 1) throw std::invalid_argument(p);
    } catch (const std::exception&) {
      throw Error(ErrorCode::InvalidArgument, "weight in '" + p + "' is not an integer");
    }
    probe.index.push_back({p.substr(0, colon), weight});
  }
  auto violations = validate_record(probe, th);
  if (!violations.empty()) {
    auto code = violations.front().code;
    auto msg = violations.front().message;
    throw Error(code, msg, std::move(violations));
  }
  TermVector q;
  for (const auto& e : probe.index) q.set(e.term, static_cast<double>(e.weight));
  return q;
}

int report(const Error& e) {
  std::cerr << "error: " << e.what() << "\n";
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reference-image indexing, ranking and navigation"};
  app.require_subcommand(1);
  app.fallthrough();

  Options o;
  app.add_option("--corpus", o.corpus, "Corpus file (JSON lines)")->envname("REFNAV_CORPUS");
  app.add_option("--thesaurus", o.thesaurus, "Thesaurus file (JSON)")->envname("REFNAV_THESAURUS");
  app.add_option("--categories", o.categories, "Comma-separated category ids to restrict similarity to")
      ->envname("REFNAV_CATEGORIES");
  app.add_option("--mosaic-size", o.mosaic_size, "Tiles per mosaic")->envname("REFNAV_MOSAIC_SIZE");
  app.add_option("--graph-k", o.graph_k, "Neighbours proposed per graph node")->envname("REFNAV_GRAPH_K");
  app.add_option("--edge-threshold", o.edge_threshold, "Minimum edge similarity")->envname("REFNAV_EDGE_THRESHOLD");
  app.add_option("--graph-seed-count", o.graph_seed_count, "Ranked images seeding a graph")
      ->envname("REFNAV_GRAPH_SEED_COUNT");
  app.add_option("--alpha", o.alpha, "Rocchio weight of the current query")->envname("REFNAV_ALPHA");
  app.add_option("--beta", o.beta, "Rocchio weight of the positive centroid")->envname("REFNAV_BETA");
  app.add_option("--gamma", o.gamma, "Rocchio weight of the negative centroid")->envname("REFNAV_GAMMA");
  app.add_flag("--idf", o.idf, "Multiply star weights by inverse document frequency")->envname("REFNAV_IDF");

  auto* index = app.add_subcommand("index", "Validate a corpus against a thesaurus");
  std::string canonical_out;
  index->add_option("--write-canonical", canonical_out, "Write the canonical corpus to this file");

  auto* search = app.add_subcommand("search", "Rank the corpus against a query");
  std::string query_image;
  std::vector<std::string> terms;
  std::size_t limit = 0;
  bool as_json = false;
  auto* qi = search->add_option("--query-image", query_image, "Query by example image id");
  auto* qt = search->add_option("--term", terms, "Query term as term:weight (repeatable)");
  qi->excludes(qt);
  search->add_option("--limit", limit, "Print at most this many results (0 = all)");
  search->add_flag("--json", as_json, "Print the ranked list as JSON");

  auto* graph = app.add_subcommand("graph", "Export the whole-corpus similarity graph");
  std::string graph_out;
  graph->add_option("--threshold", o.edge_threshold, "Minimum edge similarity");
  graph->add_option("--k", o.graph_k, "Neighbours proposed per node");
  graph->add_option("--out", graph_out, "Output file (default stdout)");

  auto* serve = app.add_subcommand("serve", "Run the HTTP/JSON service");
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string state_dir;
  serve->add_option("--host", host, "Bind address")->envname("REFNAV_HOST");
  serve->add_option("--port", port, "Bind port")->envname("REFNAV_PORT");
  serve->add_option("--state-dir", state_dir, "Directory for albums and session snapshots")->envname("REFNAV_STATE_DIR");

  CLI11_PARSE(app, argc, argv);

  try {
    if (o.thesaurus.empty()) throw Error(ErrorCode::InvalidArgument, "--thesaurus is required");
    if (o.corpus.empty()) throw Error(ErrorCode::InvalidArgument, "--corpus is required");
    auto th = open_thesaurus(o.thesaurus);
    auto corpus = open_corpus(o.corpus, *th);

    if (*index) {
      std::cout << "ok: " << corpus->size() << " images, thesaurus " << th->version() << ", checksum "
                << corpus_checksum(*corpus) << "\n";
      if (!canonical_out.empty()) {
        std::ofstream out(canonical_out, std::ios::binary | std::ios::trunc);
        out << serialize_corpus(*corpus);
      }
      return 0;
    }

    if (*search) {
      auto vz = make_vectorizer(o, *th, *corpus);
      TermVector query;
      ImageSet exclude;
      if (!query_image.empty()) {
        const ImageRecord* r = corpus->find(query_image);
        if (r == nullptr) throw Error(ErrorCode::UnknownImage, "no image '" + query_image + "' in the corpus");
        query = vz(*r);
        exclude.insert(query_image);
      } else if (!terms.empty()) {
        query = vz.restrict(query_from_terms(terms, *th));
      } else {
        throw Error(ErrorCode::InvalidArgument, "give --query-image or at least one --term");
      }
      auto ranked = rank(query, *corpus, vz, exclude);
      if (limit > 0 && ranked.entries.size() > limit) ranked.entries.resize(limit);
      if (as_json) {
        std::cout << to_json(ranked).dump(2) << "\n";
      } else {
        std::size_t pos = 1;
        for (const auto& e : ranked.entries) {
          char score[32];
          std::snprintf(score, sizeof score, "%.6f", e.score);
          std::cout << pos++ << "\t" << e.image << "\t" << score << "\n";
        }
      }
      return 0;
    }

    if (*graph) {
      auto g = build_similarity_graph(*corpus, make_vectorizer(o, *th, *corpus), o.edge_threshold, o.graph_k);
      if (graph_out.empty()) {
        std::cout << serialize_graph(g);
      } else {
        std::ofstream out(graph_out, std::ios::binary | std::ios::trunc);
        out << serialize_graph(g);
      }
      std::cerr << g.nodes.size() << " nodes, " << g.edges.size() << " edges\n";
      return 0;
    }

    if (*serve) {
      std::shared_ptr<AlbumStore> albums;
      std::optional<std::filesystem::path> dir;
      if (state_dir.empty()) {
        albums = std::make_shared<AlbumStore>();
      } else {
        dir = std::filesystem::path(state_dir);
        albums = std::make_shared<AlbumStore>(*dir / "albums");
      }
      Service service(th, corpus, albums, session_config(o), utc_now, dir);
      httplib::Server server;
      mount(server, service);
      std::cerr << "serving " << corpus->size() << " images on " << host << ":" << port << "\n";
      if (!server.listen(host, port)) {
        std::cerr << "error: cannot bind " << host << ":" << port << "\n";
        return 1;
      }
      return 0;
    }
  } catch (const Error& e) {
    return report(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
