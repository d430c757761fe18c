#ifndef AVESOR_AVESOR_HPP
#define AVESOR_AVESOR_HPP

#include "avesor/error.hpp"
#include "avesor/linalg.hpp"
#include "avesor/spectral.hpp"
#include "avesor/param_theory.hpp"
#include "avesor/appendix.hpp"
#include "avesor/ave_problem.hpp"
#include "avesor/solvers.hpp"
#include "avesor/problems.hpp"

#endif // AVESOR_AVESOR_HPP
