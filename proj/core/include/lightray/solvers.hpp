#pragma once

#include "lightray/solvers/common.hpp"
#include "lightray/solvers/fista.hpp"
#include "lightray/solvers/golub_kahan.hpp"
#include "lightray/solvers/landweber.hpp"
#include "lightray/solvers/tikhonov.hpp"
