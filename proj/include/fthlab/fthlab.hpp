#pragma once

#include "error.hpp"
#include "random.hpp"
#include "parallel.hpp"
#include "group.hpp"
#include "function.hpp"
#include "funcspace.hpp"
#include "exponents.hpp"
#include "convop.hpp"
#include "opnorm.hpp"
#include "fth.hpp"
#include "verify.hpp"
#include "serialize.hpp"
#include "cli.hpp"
