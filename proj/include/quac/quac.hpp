#pragma once

#include "quac/error.hpp"
#include "quac/linalg.hpp"
#include "quac/random.hpp"
#include "quac/graph.hpp"
#include "quac/spectral.hpp"
#include "quac/adiabatic.hpp"
#include "quac/qci.hpp"
#include "quac/metrics.hpp"
#include "quac/clustering.hpp"
#include "quac/datasets.hpp"
#include "quac/harness.hpp"
#include "quac/report.hpp"
