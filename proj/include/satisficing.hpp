#pragma once

#include "satisficing/env.hpp"
#include "satisficing/harness.hpp"
#include "satisficing/io.hpp"
#include "satisficing/oracles.hpp"
#include "satisficing/rng.hpp"
#include "satisficing/select.hpp"
#include "satisficing/select_lite.hpp"
#include "satisficing/select_lite_plus.hpp"
#include "satisficing/special.hpp"
#include "satisficing/stats.hpp"
