#include "rflab/commands.hpp"
#include "rflab/curvature.hpp"
#include "rflab/errors.hpp"
#include "rflab/flow.hpp"
#include "rflab/geometry.hpp"
#include "rflab/io.hpp"
#include "rflab/monitors.hpp"
#include "rflab/norms.hpp"
#include "rflab/tensor_lipschitz.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <optional>
#include <string>
#include <vector>

namespace py = pybind11;
using namespace rflab;

namespace {

std::vector<double> chi_or_empty(const std::optional<std::vector<double>>& chi)
{
    return chi.value_or(std::vector<double>{});
}

Band band_from(std::optional<double> lo, std::optional<double> hi)
{
    Band b;
    if (lo)
        b.lo = *lo;
    if (hi)
        b.hi = *hi;
    return b;
}

} // namespace

PYBIND11_MODULE(_rflab, m)
{
    m.doc() = "Ricci flow and local Ricci flow on rotationally symmetric metrics";
    m.attr("__version__") = kLibraryVersion;

    // exception hierarchy mirrors the C++ one; ParameterError is a ValueError
    auto param = py::register_exception<ParameterError>(m, "ParameterError", PyExc_ValueError);
    py::register_exception<StepRejected>(m, "StepRejected", param.ptr());
    py::register_exception<ConfigError>(m, "ConfigError", param.ptr());
    py::register_exception<InvariantError>(m, "InvariantError", PyExc_RuntimeError);
    py::register_exception<ConstructionError>(m, "ConstructionError", PyExc_RuntimeError);
    py::register_exception<SingularProfileError>(m, "SingularProfileError", PyExc_RuntimeError);
    py::register_exception<NumericFailure>(m, "NumericFailure", PyExc_ArithmeticError);

    py::enum_<Topology>(m, "Topology")
        .value("closed_sphere", Topology::ClosedSphere)
        .value("periodic", Topology::Periodic);

    py::class_<ProfileMetric>(m, "ProfileMetric")
        .def(py::init<>())
        .def_readwrite("q", &ProfileMetric::q)
        .def_readwrite("x", &ProfileMetric::x)
        .def_readwrite("phi", &ProfileMetric::phi)
        .def_readwrite("psi", &ProfileMetric::psi)
        .def_readwrite("topology", &ProfileMetric::topology)
        .def_readwrite("symmetric", &ProfileMetric::symmetric)
        .def_readwrite("period", &ProfileMetric::period)
        .def("__len__", &ProfileMetric::size)
        .def("dim", &ProfileMetric::dim)
        .def("validate", &ProfileMetric::validate)
        .def("__repr__", [](const ProfileMetric& p) {
            return "<ProfileMetric q=" + std::to_string(p.q) + " nodes=" + std::to_string(p.size()) + " " +
                   to_string(p.topology) + ">";
        });

    py::class_<CutoffProfile>(m, "CutoffProfile")
        .def(py::init<>())
        .def_readwrite("chi", &CutoffProfile::chi)
        .def_readwrite("center", &CutoffProfile::center)
        .def_readwrite("r_in", &CutoffProfile::r_in)
        .def_readwrite("r_out", &CutoffProfile::r_out)
        .def("validate", &CutoffProfile::validate);

    py::class_<CoordinateMetricField>(m, "CoordinateMetricField")
        .def(py::init<>())
        .def_readwrite("dim", &CoordinateMetricField::dim)
        .def_readwrite("axes", &CoordinateMetricField::axes)
        .def_readwrite("g", &CoordinateMetricField::g)
        .def("node_count", &CoordinateMetricField::node_count)
        .def("at", [](const CoordinateMetricField& f, const std::vector<double>& p) { return f.at(p); })
        .def("validate", &CoordinateMetricField::validate);

    py::class_<DumbbellShape>(m, "DumbbellShape")
        .def(py::init<>())
        .def(py::init([](double G, double c, int q, double kappa, double blend_width, int M, double cluster) {
                 return DumbbellShape{G, c, q, kappa, blend_width, M, cluster};
             }),
             py::arg("G") = 0.2, py::arg("c") = 1.0, py::arg("q") = 3, py::arg("kappa") = 1.0,
             py::arg("blend_width") = -1.0, py::arg("M") = 800, py::arg("cluster") = 0.9)
        .def_readwrite("G", &DumbbellShape::G)
        .def_readwrite("c", &DumbbellShape::c)
        .def_readwrite("q", &DumbbellShape::q)
        .def_readwrite("kappa", &DumbbellShape::kappa)
        .def_readwrite("blend_width", &DumbbellShape::blend_width)
        .def_readwrite("M", &DumbbellShape::M)
        .def_readwrite("cluster", &DumbbellShape::cluster);

    m.def("build_round_sphere", &build_round_sphere, py::arg("rho"), py::arg("q"), py::arg("M"));
    m.def("build_cylinder", &build_cylinder, py::arg("rho"), py::arg("q"), py::arg("length"), py::arg("M"));
    m.def("build_dumbbell", &build_dumbbell, py::arg("shape"));
    m.def("build_cutoff", &build_cutoff, py::arg("profile"), py::arg("center"), py::arg("r_in"), py::arg("r_out"));
    m.def("unit_cutoff", &unit_cutoff, py::arg("profile"), py::arg("value") = 1.0);
    m.def("arclength", &arclength);
    m.def("centered_arclength", &centered_arclength);
    m.def("total_arclength", &total_arclength);
    m.def("profile_coordinate_field", &profile_coordinate_field);

    // curvature
    py::class_<CurvatureState>(m, "CurvatureState")
        .def_readonly("q", &CurvatureState::q)
        .def_readonly("psi", &CurvatureState::psi)
        .def_readonly("psi_s", &CurvatureState::psi_s)
        .def_readonly("psi_ss", &CurvatureState::psi_ss)
        .def_readonly("K_N", &CurvatureState::K_N)
        .def_readonly("K_T", &CurvatureState::K_T)
        .def_readonly("ric_ss", &CurvatureState::ric_ss)
        .def_readonly("ric_fiber", &CurvatureState::ric_fiber)
        .def_readonly("R", &CurvatureState::R)
        .def_readonly("rm_norm", &CurvatureState::rm_norm)
        .def_readonly("a", &CurvatureState::a);

    py::class_<Extremum>(m, "Extremum")
        .def_readonly("node", &Extremum::node)
        .def_readonly("psi", &Extremum::psi)
        .def_readonly("s", &Extremum::s);

    py::class_<NeckReport>(m, "NeckReport")
        .def_readonly("necks", &NeckReport::necks)
        .def_readonly("bumps", &NeckReport::bumps)
        .def_readonly("r_min", &NeckReport::r_min)
        .def_readonly("r_max", &NeckReport::r_max);

    m.def("evaluate_curvature", py::overload_cast<const ProfileMetric&>(&evaluate_curvature), py::arg("profile"));
    m.def("ricci_norm", &ricci_norm);
    m.def("riemann_norm_squared", &riemann_norm_squared, py::arg("k_normal"), py::arg("k_tangential"), py::arg("q"));
    m.def("neck_bump_analysis", &neck_bump_analysis);

    // flow
    py::enum_<FlowMode>(m, "FlowMode").value("ricci", FlowMode::Ricci).value("local_ricci", FlowMode::LocalRicci);
    py::enum_<StopReason>(m, "StopReason")
        .value("reached_t_end", StopReason::ReachedTEnd)
        .value("pinch_detected", StopReason::PinchDetected)
        .value("curvature_cap", StopReason::CurvatureCap)
        .value("numeric_failure", StopReason::NumericFailure);

    py::class_<DtPolicy>(m, "DtPolicy")
        .def(py::init<>())
        .def_readwrite("adaptive", &DtPolicy::adaptive)
        .def_readwrite("fixed_dt", &DtPolicy::fixed_dt)
        .def_readwrite("cfl", &DtPolicy::cfl);

    py::class_<FlowConfig>(m, "FlowConfig")
        .def(py::init<>())
        .def_readwrite("mode", &FlowConfig::mode)
        .def_readwrite("cutoff", &FlowConfig::cutoff)
        .def_readwrite("dt", &FlowConfig::dt)
        .def_readwrite("t_end", &FlowConfig::t_end)
        .def_readwrite("snapshot_stride", &FlowConfig::snapshot_stride)
        .def_readwrite("pinch_fraction", &FlowConfig::pinch_fraction)
        .def_readwrite("curvature_cap", &FlowConfig::curvature_cap)
        .def_readwrite("min_dt", &FlowConfig::min_dt)
        .def("validate", &FlowConfig::validate);

    py::class_<Snapshot>(m, "Snapshot").def_readonly("t", &Snapshot::t).def_readonly("profile", &Snapshot::profile);

    py::class_<SeriesRow>(m, "SeriesRow")
        .def_readonly("t", &SeriesRow::t)
        .def_readonly("dt", &SeriesRow::dt)
        .def_readonly("psi_min", &SeriesRow::psi_min)
        .def_readonly("rm_max", &SeriesRow::rm_max)
        .def_readonly("chi2_rm_max", &SeriesRow::chi2_rm_max)
        .def_readonly("volume", &SeriesRow::volume)
        .def_readonly("energy", &SeriesRow::energy)
        .def_readonly("energy2", &SeriesRow::energy2);

    py::class_<Trajectory>(m, "Trajectory")
        .def_readonly("mode", &Trajectory::mode)
        .def_readonly("chi", &Trajectory::chi)
        .def_readonly("snapshots", &Trajectory::snapshots)
        .def_readonly("series", &Trajectory::series)
        .def_readonly("stop_reason", &Trajectory::stop_reason)
        .def_readonly("message", &Trajectory::message)
        .def_readonly("psi_min0", &Trajectory::psi_min0)
        .def_readonly("curvature_cap", &Trajectory::curvature_cap);

    m.def("cfl_limit", &cfl_limit, py::arg("profile"), py::arg("cfl") = 0.5);
    m.def(
        "step",
        [](const ProfileMetric& p, double dt, std::optional<std::vector<double>> chi, double cfl) {
            const auto c = chi_or_empty(chi);
            return step(p, c, dt, cfl);
        },
        py::arg("profile"), py::arg("dt"), py::arg("chi") = py::none(), py::arg("cfl") = 0.5);
    m.def("run_flow", &run_flow, py::arg("initial"), py::arg("config"), py::call_guard<py::gil_scoped_release>());

    py::class_<ResidualReport>(m, "ResidualReport")
        .def_readonly("max_residual_kn", &ResidualReport::max_residual_kn)
        .def_readonly("max_residual_kt", &ResidualReport::max_residual_kt)
        .def_readonly("max_residual", &ResidualReport::max_residual)
        .def_readonly("rate_scale", &ResidualReport::rate_scale)
        .def_readonly("dt", &ResidualReport::dt)
        .def_readonly("snapshots_used", &ResidualReport::snapshots_used);
    m.def("curvature_evolution_residual", &curvature_evolution_residual, py::arg("trajectory"), py::arg("first"),
          py::arg("count"));

    // norms
    m.def("sphere_area", &sphere_area);
    m.def("ball_volume", &ball_volume);
    m.def(
        "band_volume",
        [](const ProfileMetric& p, std::optional<double> lo, std::optional<double> hi) {
            return band_volume(p, band_from(lo, hi));
        },
        py::arg("profile"), py::arg("lo") = py::none(), py::arg("hi") = py::none());
    m.def(
        "lp_norm",
        [](const std::vector<double>& f, double p, const ProfileMetric& profile, std::optional<double> lo,
           std::optional<double> hi) { return lp_norm(f, p, profile, band_from(lo, hi)); },
        py::arg("field"), py::arg("p"), py::arg("profile"), py::arg("lo") = py::none(), py::arg("hi") = py::none());
    m.def("varpi", &varpi, py::arg("n"), py::arg("eta"));
    m.def("deane_iso_constant", &deane_iso_constant, py::arg("n"), py::arg("eta"), py::arg("eps"));
    m.def("sobolev_from_iso", &sobolev_from_iso, py::arg("n"), py::arg("C_s"));

    py::class_<IsoScan>(m, "IsoScan")
        .def_readonly("base", &IsoScan::base)
        .def_readonly("b", &IsoScan::b)
        .def_readonly("volume", &IsoScan::volume)
        .def_readonly("boundary", &IsoScan::boundary)
        .def_readonly("quotient", &IsoScan::quotient)
        .def_readonly("sup", &IsoScan::sup)
        .def_readonly("argsup", &IsoScan::argsup);
    m.def(
        "iso_quotient_scan",
        [](const ProfileMetric& p, const std::vector<double>& b, std::optional<double> base) {
            return iso_quotient_scan(p, b, base);
        },
        py::arg("profile"), py::arg("b_values"), py::arg("base") = py::none());

    py::class_<AssumptionItem>(m, "AssumptionItem")
        .def_readonly("pass_", &AssumptionItem::pass)
        .def_readonly("margin", &AssumptionItem::margin)
        .def_readonly("measured", &AssumptionItem::measured)
        .def_readonly("bound", &AssumptionItem::bound);
    py::class_<AssumptionReport>(m, "AssumptionReport")
        .def_readonly("volume", &AssumptionReport::volume)
        .def_readonly("energy", &AssumptionReport::energy)
        .def_readonly("ricci", &AssumptionReport::ricci)
        .def("all_pass", &AssumptionReport::all_pass);
    m.def("digamma_check", &digamma_check, py::arg("profile"), py::arg("center"), py::arg("r"), py::arg("tau"),
          py::arg("p"), py::arg("K"), py::arg("eta"));

    // tensor Lipschitz
    m.def("pencil_eigenvalues", &pencil_eigenvalues);
    m.def("tl_distance_at", &tl_distance_at);
    m.def("tl_distance", &tl_distance);
    m.def("uniform_tl_bound", &uniform_tl_bound, py::arg("eps"), py::arg("lambda_min"));

    py::class_<ClosenessReport>(m, "ClosenessReport")
        .def_readonly("eigen_deviation", &ClosenessReport::eigen_deviation)
        .def_readonly("frobenius_deviation", &ClosenessReport::frobenius_deviation)
        .def_readonly("det_deviation", &ClosenessReport::det_deviation)
        .def_readonly("codim1_det_deviation", &ClosenessReport::codim1_det_deviation)
        .def_readonly("bridge_bound", &ClosenessReport::bridge_bound)
        .def_readonly("bridge_holds", &ClosenessReport::bridge_holds)
        .def_readonly("eigenvalues", &ClosenessReport::eigenvalues)
        .def_readonly("reconstruction_error", &ClosenessReport::reconstruction_error);
    m.def("matrix_closeness", &matrix_closeness);

    py::class_<IsoRatioReport>(m, "IsoRatioReport")
        .def_readonly("delta", &IsoRatioReport::delta)
        .def_readonly("bound", &IsoRatioReport::bound)
        .def_readonly("x_b", &IsoRatioReport::x_b)
        .def_readonly("log_ratio", &IsoRatioReport::log_ratio)
        .def_readonly("max_abs_log_ratio", &IsoRatioReport::max_abs_log_ratio)
        .def_readonly("pass_", &IsoRatioReport::pass);
    m.def(
        "iso_ratio_check",
        [](const ProfileMetric& a, const ProfileMetric& b, std::size_t base, const std::vector<std::size_t>& ends) {
            return iso_ratio_check(a, b, base, ends);
        },
        py::arg("p1"), py::arg("p2"), py::arg("base_node"), py::arg("end_nodes"));

    // monitors
    py::class_<HypothesisItem>(m, "HypothesisItem")
        .def_readonly("pass_", &HypothesisItem::pass)
        .def_readonly("applicable", &HypothesisItem::applicable)
        .def_readonly("measured", &HypothesisItem::measured)
        .def_readonly("bound", &HypothesisItem::bound)
        .def_readonly("margin", &HypothesisItem::margin);
    py::class_<AkReport>(m, "AkReport")
        .def_readonly("q", &AkReport::q)
        .def_readonly("mu", &AkReport::mu)
        .def_readonly("tangential", &AkReport::tangential)
        .def_readonly("scalar", &AkReport::scalar)
        .def_readonly("pinching", &AkReport::pinching)
        .def_readonly("ratio", &AkReport::ratio)
        .def_readonly("necks", &AkReport::necks)
        .def_readonly("bumps", &AkReport::bumps)
        .def("all_pass", &AkReport::all_pass);
    m.def("ak_ratio_threshold", &ak_ratio_threshold, py::arg("mu"), py::arg("q"));
    m.def("ak_hypotheses", &ak_hypotheses, py::arg("profile"), py::arg("mu") = 2.0);

    py::class_<PinchReport>(m, "PinchReport")
        .def_readonly("pinched", &PinchReport::pinched)
        .def_readonly("has_neck", &PinchReport::has_neck)
        .def_readonly("singular_time", &PinchReport::singular_time)
        .def_readonly("resolution", &PinchReport::resolution)
        .def_readonly("r_min0", &PinchReport::r_min0)
        .def_readonly("threshold", &PinchReport::threshold)
        .def_readonly("below_threshold", &PinchReport::below_threshold)
        .def_readonly("hypotheses", &PinchReport::hypotheses)
        .def_readonly("t", &PinchReport::t)
        .def_readonly("r_min", &PinchReport::r_min)
        .def_readonly("caveat", &PinchReport::caveat);
    m.def("pinch_monitor", &pinch_monitor, py::arg("trajectory"), py::arg("mu") = 2.0);

    py::class_<GronwallReport>(m, "GronwallReport")
        .def_readonly("holds", &GronwallReport::holds)
        .def_readonly("envelope", &GronwallReport::envelope)
        .def_readonly("max_excess", &GronwallReport::max_excess)
        .def_readonly("first_violation", &GronwallReport::first_violation);
    m.def(
        "gronwall_envelope",
        [](const std::vector<double>& t, const std::vector<double>& f, const std::vector<double>& g, double b) {
            return gronwall_envelope(t, f, g, b);
        },
        py::arg("t"), py::arg("f"), py::arg("g"), py::arg("b"));

    // config-driven commands; JSON crosses the boundary as text
    m.def(
        "parse_config",
        [](const std::string& text, const std::string& source) { return parse_config_text(text, source).dump(); },
        py::arg("text"), py::arg("source") = "config");
    m.def(
        "simulate",
        [](const std::string& config_json, std::optional<std::filesystem::path> out, std::optional<int> grid,
           std::optional<double> dt) {
            Overrides o;
            o.grid = grid;
            o.dt = dt;
            const Scenario sc = scenario_from_config(Json::parse(config_json), o);
            SimulationResult r;
            {
                py::gil_scoped_release release;
                r = simulate(sc, out);
            }
            return py::make_tuple(r.trajectory, r.monitors.dump(), r.exit_code, config_hash(sc.effective));
        },
        py::arg("config_json"), py::arg("out") = py::none(), py::arg("grid") = py::none(), py::arg("dt") = py::none());
    m.def("band_rm2_closed_form", &band_rm2_closed_form, py::arg("G"), py::arg("c"));
}
