#pragma once

// Umbrella header for the gpr library: attribute-aware synthetic dataset
// generation, Gram-matrix style analysis, and a desk-scale re-ID
// train/evaluate loop.

#include "gpr/attributes.hpp"
#include "gpr/errors.hpp"
#include "gpr/eval.hpp"
#include "gpr/extractor.hpp"
#include "gpr/format.hpp"
#include "gpr/image.hpp"
#include "gpr/manifest.hpp"
#include "gpr/matrix.hpp"
#include "gpr/model.hpp"
#include "gpr/parallel.hpp"
#include "gpr/render.hpp"
#include "gpr/report.hpp"
#include "gpr/rng.hpp"
#include "gpr/style.hpp"
#include "gpr/trainer.hpp"
#include "gpr/version.hpp"
