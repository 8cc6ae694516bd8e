#pragma once

#include "subnyq/dft.hpp"
#include "subnyq/error.hpp"
#include "subnyq/experiment.hpp"
#include "subnyq/fri_recovery.hpp"
#include "subnyq/io.hpp"
#include "subnyq/rng.hpp"
#include "subnyq/samplers.hpp"
#include "subnyq/signal_models.hpp"
#include "subnyq/sparse_recovery.hpp"
#include "subnyq/spectral_recovery.hpp"
#include "subnyq/types.hpp"
