#pragma once

#include "algorithm.hpp"
#include "bounds.hpp"
#include "errors.hpp"
#include "exp_family.hpp"
#include "harness.hpp"
#include "incomplete_beta.hpp"
#include "parse.hpp"
#include "random.hpp"
#include "reservoir.hpp"
