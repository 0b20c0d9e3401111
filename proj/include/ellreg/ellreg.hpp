#pragma once

#include "ellreg/error.hpp"
#include "ellreg/kernel.hpp"
#include "ellreg/laurent.hpp"
#include "ellreg/expr.hpp"
#include "ellreg/parser.hpp"
#include "ellreg/regint.hpp"
#include "ellreg/pv_oracle.hpp"
