#pragma once

// Umbrella header.
#include "wsi/analysis.hpp"
#include "wsi/cluster.hpp"
#include "wsi/combine.hpp"
#include "wsi/config.hpp"
#include "wsi/dataset.hpp"
#include "wsi/evaluate.hpp"
#include "wsi/metrics.hpp"
#include "wsi/pipeline.hpp"
#include "wsi/substitutes.hpp"
#include "wsi/synthetic.hpp"
#include "wsi/vectorize.hpp"
#include "wsi/version.hpp"
