// Convenience include for the whole library.
#pragma once

#include "owt/analytics.hpp"
#include "owt/batchplan.hpp"
#include "owt/classifier.hpp"
#include "owt/core.hpp"
#include "owt/features.hpp"
#include "owt/fixtures.hpp"
#include "owt/hash.hpp"
#include "owt/ingest.hpp"
#include "owt/metrics.hpp"
#include "owt/rng.hpp"
