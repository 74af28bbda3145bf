#ifndef DNR_DNR_HPP
#define DNR_DNR_HPP

#include "centrality.hpp"
#include "config.hpp"
#include "design.hpp"
#include "error.hpp"
#include "estimator.hpp"
#include "graph.hpp"
#include "io.hpp"
#include "logistic.hpp"
#include "metrics.hpp"
#include "panel.hpp"
#include "rng.hpp"
#include "simulate.hpp"
#include "smoothing.hpp"
#include "synthetic.hpp"
#include "terms.hpp"

#endif  // DNR_DNR_HPP
