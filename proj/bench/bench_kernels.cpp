// Serial reference path against the OpenMP kernels.
//
//   RFV_THREADS=8 ./bench_kernels --benchmark_counters_tabular=true

#include "rfv/driver.hpp"

#include <benchmark/benchmark.h>

#include <cmath>

using namespace rfv;

namespace {

Exec exec_of(const benchmark::State& st) { return st.range(1) ? Exec::parallel : Exec::serial; }

void label(benchmark::State& st) { st.SetLabel(st.range(1) ? "parallel" : "serial"); }

Vec4 smooth(const Vec2& x, const IdealGasEos& eos) {
    const double s = std::sin(2 * M_PI * (x.x() + 0.5 * x.y()));
    return to_conserved(Prim2{1.0 + 0.3 * s, Vec2(0.5, -0.3 * s), 1.0 + 0.2 * s}, eos);
}

void BM_rd_scalar(benchmark::State& st) {
    const TriMesh mesh = structured_tri_mesh(static_cast<int>(st.range(0)), 1.0, true, 0.2, 1);
    const Vec2 a(1.0, 0.5);
    std::vector<double> u(mesh.num_vertices());
    for (int i = 0; i < mesh.num_vertices(); ++i) u[i] = advection_profile(mesh.vertices[i]);
    const double dt = rd_stable_dt(mesh, a);
    for (auto _ : st) benchmark::DoNotOptimize(rd_step(mesh, a, u, dt, RdScheme::limited, exec_of(st)));
    st.SetItemsProcessed(st.iterations() * mesh.num_triangles());
    label(st);
}

void BM_rd_euler(benchmark::State& st) {
    const IdealGasEos eos(1.4);
    const TriMesh mesh = structured_tri_mesh(static_cast<int>(st.range(0)), 1.0, true, 0.2, 1);
    std::vector<Vec4> u(mesh.num_vertices());
    for (int i = 0; i < mesh.num_vertices(); ++i) u[i] = smooth(mesh.vertices[i], eos);
    const double dt = rd_stable_dt(mesh, u, eos);
    for (auto _ : st) benchmark::DoNotOptimize(rd_step(mesh, u, dt, RdScheme::n, eos, exec_of(st)));
    st.SetItemsProcessed(st.iterations() * mesh.num_triangles());
    label(st);
}

void BM_cornerfv(benchmark::State& st) {
    const IdealGasEos eos(1.4);
    const int n = static_cast<int>(st.range(0));
    const CornerFvSetup s = make_cornerfv_setup(cartesian_poly_mesh(n, n, 1.0, 1.0, true, 0.2, 2));
    std::vector<Vec4> u(s.mesh.num_cells());
    for (int c = 0; c < s.mesh.num_cells(); ++c) u[c] = smooth(s.mesh.centroid(c), eos);
    const double dt = cornerfv_stable_dt(s, u, CornerBc::transmissive, eos);
    for (auto _ : st) {
        benchmark::DoNotOptimize(
            cornerfv_step(s, u, dt, CornerBc::transmissive, eos, CornerPath::flux, exec_of(st), true));
    }
    st.SetItemsProcessed(st.iterations() * s.mesh.num_cells());
    label(st);
}

void BM_lagrange(benchmark::State& st) {
    const IdealGasEos eos(1.4);
    const int n = static_cast<int>(st.range(0));
    PolyMesh mesh = cartesian_poly_mesh(n, n, 1.0, 1.0, true, 0.2, 3);
    std::vector<LagState> s(mesh.num_cells());
    for (int c = 0; c < mesh.num_cells(); ++c) s[c] = LagState::from_prim(to_primitive(smooth(mesh.centroid(c), eos), eos), eos);
    const LagrangeSystem sys0 = make_lagrange_system(std::move(mesh), std::move(s));
    for (auto _ : st) {
        st.PauseTiming();
        LagrangeSystem sys = sys0;
        st.ResumeTiming();
        const NodePhase ph = lagrange_nodal_phase(sys, eos, exec_of(st));
        benchmark::DoNotOptimize(lagrange_step(sys, lagrange_stable_dt(sys, ph), eos, exec_of(st), &ph));
    }
    st.SetItemsProcessed(st.iterations() * sys0.mesh.num_cells());
    label(st);
}

void BM_fv1d(benchmark::State& st) {
    const IdealGasEos eos(1.4);
    const int n = static_cast<int>(st.range(0));
    const Grid1D grid = Grid1D::uniform(n, 0.0, 1.0);
    std::vector<Vec3> u(n);
    for (int i = 0; i < n; ++i) u[i] = to_conserved(grid.center(i) < 0.5 ? kSodLeft : kSodRight, eos);
    const double dt = stable_dt(grid, u, eos);
    for (auto _ : st) {
        benchmark::DoNotOptimize(fv1d_step(grid, u, dt, Scheme1D::roe, Bc1D::transmissive, eos, 0.5, exec_of(st)));
    }
    st.SetItemsProcessed(st.iterations() * n);
    label(st);
}

}  // namespace

BENCHMARK(BM_rd_scalar)->ArgsProduct({{64, 256}, {0, 1}})->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_rd_euler)->ArgsProduct({{64, 256}, {0, 1}})->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_cornerfv)->ArgsProduct({{64, 256}, {0, 1}})->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_lagrange)->ArgsProduct({{64, 256}, {0, 1}})->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_fv1d)->ArgsProduct({{10000, 100000}, {0, 1}})->Unit(benchmark::kMillisecond)->UseRealTime();

int main(int argc, char** argv) {
    configure_threads();
    benchmark::Initialize(&argc, argv);
    if (benchmark::ReportUnrecognizedArguments(argc, argv)) return 1;
    benchmark::RunSpecifiedBenchmarks();
    benchmark::Shutdown();
    return 0;
}
