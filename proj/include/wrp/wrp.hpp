#pragma once

#include "wrp/error.hpp"
#include "wrp/check_report.hpp"
#include "wrp/space.hpp"
#include "wrp/grid.hpp"
#include "wrp/weight.hpp"
#include "wrp/spaces.hpp"
#include "wrp/taylor.hpp"
#include "wrp/multilinear.hpp"
#include "wrp/jet_map.hpp"
#include "wrp/expr.hpp"
#include "wrp/jets.hpp"
#include "wrp/seminorms.hpp"
#include "wrp/convergence.hpp"
#include "wrp/operators.hpp"
#include "wrp/restricted.hpp"
#include "wrp/verify.hpp"
