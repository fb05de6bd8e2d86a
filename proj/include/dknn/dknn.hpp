#pragma once

#include "benchmark.hpp"
#include "classifier.hpp"
#include "core.hpp"
#include "csv.hpp"
#include "cv.hpp"
#include "dd.hpp"
#include "depth.hpp"
#include "estimators.hpp"
#include "gaussian.hpp"
#include "ingest.hpp"
#include "knn.hpp"
#include "manifest.hpp"
#include "neighbors.hpp"
#include "realdata.hpp"
#include "setups.hpp"
