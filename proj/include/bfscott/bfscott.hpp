#pragma once

#include "bf_engine.hpp"
#include "certificate.hpp"
#include "finite_oracle.hpp"
#include "formula.hpp"
#include "order_algebra.hpp"
#include "parser.hpp"
#include "scott.hpp"
#include "sequence_language.hpp"
