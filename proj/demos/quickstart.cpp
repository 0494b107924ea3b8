// Rolls a unit sphere towards a goal heading, then checks the bracket rank
// at the final contact state.

#include <cmath>
#include <cstdio>

#include "darboux_roll/controllability.hpp"
#include "darboux_roll/sim.hpp"

using namespace darboux_roll;

int main() {
    Scenario sc;
    sc.model = ModelKind::DarbouxS;
    sc.geom = SphereGeometry{1.0};
    sc.inputs = InputSchedule::constant({0.1, 1.0, 0.0});
    sc.goal = GoalDirection{std::atan2(1.0, 3.0)};
    sc.span = 3.0;
    sc.step = 1e-3;

    const Trajectory traj = integrate(sc);
    const Sample& end = traj.samples.back();
    std::printf("arc length %.3f: plane (%.4f, %.4f), sphere (u_o %.4f, v_o %.4f), psi %.4f\n", end.s,
                end.state.u_s, end.state.v_s, end.state.u_o, end.state.v_o, end.state.psi);
    std::printf("heading %.6f rad, goal %.6f rad\n", end.heading, sc.goal->g_f);

    const BracketReport rep = controllability_matrix(end.state, end.angles, sc.geom);
    std::printf("bracket rank %d, det %.6f (closed form %.6f)\n", rep.rank, rep.det_numeric, rep.det_closed);
    return 0;
}
