// Convenience umbrella header.
#pragma once

#include "scl/corpus.hpp"
#include "scl/diagnostics.hpp"
#include "scl/eval.hpp"
#include "scl/featurize.hpp"
#include "scl/io.hpp"
#include "scl/linalg.hpp"
#include "scl/models.hpp"
#include "scl/neural.hpp"
#include "scl/pivot.hpp"
#include "scl/rng.hpp"
#include "scl/stats.hpp"
#include "scl/svd.hpp"
#include "scl/synthetic.hpp"
#include "scl/version.hpp"
