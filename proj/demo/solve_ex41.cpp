// Solves the tridiag(-1, 8, -1) test problem with the SOR-like iteration at
// the optimal parameter and with generalized Newton, and prints a summary.

#include <cstdio>

#include "avesor/avesor.hpp"

int main()
{
    using namespace avesor;

    const AveProblem p = gen_ex41(1000);
    const double nu = nu_estimate(p.a).nu;
    const auto params = param_bundle(nu);

    std::printf("nu = %.4f, region %s = (%.4f, %.4f)\n", nu, to_string(params.region.kind), params.region.lo,
                params.region.hi);

    SolverSettings s;
    s.omega = params.omega_opt;
    const SolveReport sor = sor_like(p, s);
    std::printf("SOR-like  omega = %.4f  IT = %d  RES = %.3e\n", s.omega, sor.iterations, sor.final_residual());

    const SolveReport nt = generalized_newton(p, {});
    std::printf("Newton                   IT = %d  RES = %.3e\n", nt.iterations, nt.final_residual());
    return sor.converged && nt.converged ? 0 : 1;
}
