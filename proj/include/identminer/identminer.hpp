#ifndef IDENTMINER_IDENTMINER_HPP
#define IDENTMINER_IDENTMINER_HPP

/**
 * @file identminer.hpp
 * @brief Umbrella header for the whole library.
 */

#include "core.hpp"
#include "resources.hpp"
#include "parallel.hpp"
#include "ingest.hpp"
#include "textprep.hpp"
#include "filters.hpp"
#include "scorer.hpp"
#include "datasets.hpp"
#include "metrics.hpp"
#include "model.hpp"
#include "unigram.hpp"
#include "name_cnn.hpp"
#include "baselines.hpp"
#include "eval.hpp"
#include "stats.hpp"
#include "analytics.hpp"

#endif
