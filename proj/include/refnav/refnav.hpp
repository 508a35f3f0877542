#pragma once

#include "refnav/album_store.hpp"
#include "refnav/catalog.hpp"
#include "refnav/error.hpp"
#include "refnav/graph.hpp"
#include "refnav/navigation.hpp"
#include "refnav/snapshot.hpp"
#include "refnav/service.hpp"
#include "refnav/thesaurus.hpp"
#include "refnav/vsm.hpp"
