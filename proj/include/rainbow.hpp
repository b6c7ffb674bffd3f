#pragma once

#include "rainbow/census.hpp"
#include "rainbow/cli.hpp"
#include "rainbow/colouring.hpp"
#include "rainbow/config_model.hpp"
#include "rainbow/errors.hpp"
#include "rainbow/harness.hpp"
#include "rainbow/io.hpp"
#include "rainbow/rational.hpp"
#include "rainbow/rng.hpp"
#include "rainbow/search.hpp"
#include "rainbow/theory.hpp"
#include "rainbow/variance.hpp"
