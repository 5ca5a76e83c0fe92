#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "cli.hpp"
#include "mwlab/arith_sieve.hpp"
#include "mwlab/fwht.hpp"
#include "mwlab/lemma_lab.hpp"
#include "mwlab/sum_lab.hpp"
#include "mwlab/walsh.hpp"

namespace py = pybind11;
using namespace mwlab;

namespace {

std::string dump(const CheckReport& r)
{
    return to_json(r).dump();
}

std::string dump_all(const std::vector<CheckReport>& rs)
{
    Json out = Json::array();
    for (const auto& r : rs) out.push_back(to_json(r));
    return out.dump();
}

ArithmeticSequence from_array(py::array values, int lambda)
{
    if (values.ndim() != 1 || static_cast<std::size_t>(values.shape(0)) != (std::size_t{1} << lambda)) {
        throw ArgumentError("table must be one-dimensional with 2^lambda entries");
    }
    if (py::isinstance<py::array_t<double>>(values) && values.dtype().kind() == 'f') {
        auto a = py::array_t<double, py::array::c_style | py::array::forcecast>(values);
        return ArithmeticSequence::from_reals(lambda, FunctionKind::custom, {a.data(), a.data() + a.size()});
    }
    auto a = py::array_t<std::int8_t, py::array::c_style | py::array::forcecast>(values);
    return ArithmeticSequence::from_signs(lambda, FunctionKind::custom, {a.data(), a.data() + a.size()});
}

py::array to_array(const ArithmeticSequence& seq)
{
    if (seq.integral()) {
        auto s = seq.signs();
        return py::array_t<std::int8_t>(static_cast<py::ssize_t>(s.size()), s.data());
    }
    auto r = seq.reals();
    return py::array_t<double>(static_cast<py::ssize_t>(r.size()), r.data());
}

BilinearConfig bilinear_config(std::uint64_t mask, int mu, int nu, int rho, int K, double epsilon,
                               std::optional<std::vector<double>> beta)
{
    BilinearConfig c;
    c.mu = mu;
    c.nu = nu;
    c.mask = WalshMask(mask, std::min(mu + nu + 2, WalshMask::kMaxLambda));
    c.rho = rho;
    c.K = K;
    c.epsilon = epsilon;
    if (beta) c.beta = *beta;
    return c;
}

}  // namespace

PYBIND11_MODULE(_mwlab, m)
{
    m.doc() = "Walsh correlation and bilinear-sum laboratory";
    m.attr("__version__") = MWLAB_VERSION;

    py::register_exception<ArgumentError>(m, "ArgumentError", PyExc_ValueError);
    py::register_exception<ResourceError>(m, "ResourceError", PyExc_MemoryError);

    m.def("sieve", [](const std::string& kind, int lambda) {
        return to_array(sieve(parse_function_kind(kind), lambda));
    }, py::arg("kind"), py::arg("lam"));

    m.def("walsh_eval", [](std::uint64_t mask, int lambda, std::uint64_t x) {
        return walsh_eval(WalshMask(mask, lambda), x);
    }, py::arg("mask"), py::arg("lam"), py::arg("x"));

    m.def("trig_coefficient", [](std::uint64_t mask, int lambda, std::uint64_t k) {
        return trig_coefficient(WalshMask(mask, lambda), k).value;
    }, py::arg("mask"), py::arg("lam"), py::arg("k"));

    m.def("l1_norm", [](std::uint64_t mask, int lambda) {
        return l1_accumulate(WalshMask(mask, lambda), FullRange{});
    }, py::arg("mask"), py::arg("lam"));

    m.def("sup_norm", [](std::uint64_t mask, int lambda) { return sup_magnitude(WalshMask(mask, lambda)); },
          py::arg("mask"), py::arg("lam"));

    m.def("fwht", [](py::array values) -> py::array {
        if (values.dtype().kind() == 'f') {
            auto a = py::array_t<double, py::array::c_style | py::array::forcecast>(values);
            py::array_t<double> out(a.size());
            std::copy(a.data(), a.data() + a.size(), out.mutable_data());
            fwht_in_place(std::span<double>(out.mutable_data(), static_cast<std::size_t>(out.size())));
            return out;
        }
        auto a = py::array_t<std::int64_t, py::array::c_style | py::array::forcecast>(values);
        py::array_t<std::int64_t> out(a.size());
        std::copy(a.data(), a.data() + a.size(), out.mutable_data());
        fwht_in_place(std::span<std::int64_t>(out.mutable_data(), static_cast<std::size_t>(out.size())));
        return out;
    }, py::arg("values"), "Unnormalized Walsh-Hadamard transform; returns a new array.");

    m.def("max_correlation", [](py::array values, int lambda) {
        auto best = max_correlation(from_array(values, lambda));
        return py::make_tuple(best.mask.bits(), best.value);
    }, py::arg("values"), py::arg("lam"));

    m.def("_theorem_scan", [](const std::string& kind, int lo, int hi) {
        return dump_all(theorem_scan(parse_function_kind(kind), lo, hi));
    });

    m.def("_lemma_check", [](int lemma, int lambda, std::uint64_t mask, int r, std::uint64_t a,
                             std::uint64_t begin, std::uint64_t end) {
        const LemmaChecker checker(lambda);
        const WalshMask w(mask, lambda);
        switch (lemma) {
        case 1: return dump(checker.lemma1(w));
        case 2: return dump(checker.lemma2(w));
        case 3: return dump(checker.lemma3(w));
        case 4: return dump(checker.lemma4(r, a, w));
        case 6: return dump(checker.lemma6(FrequencyInterval{begin, end}, w));
        default: throw ArgumentError("lemma must be 1, 2, 3, 4 or 6 (use check_lemma5)");
        }
    });

    m.def("_check_lemma5", [](int lambda, int sigma, std::vector<int> ts, std::uint64_t mask) {
        return dump(check_lemma5(lambda, sigma, ts, WalshMask(mask, lambda)));
    });

    m.def("_run_scan", [](const std::string& config) {
        auto result = run_scan(ScanConfig::from_json(Json::parse(config)));
        Json out;
        out["reports"] = Json::array();
        for (const auto& r : result.reports) out["reports"].push_back(to_json(r));
        out["summary"] = result.summary;
        return out.dump();
    });

    m.def("bilinear_sum", [](std::uint64_t mask, int mu, int nu, std::optional<std::vector<double>> beta) {
        return bilinear_sum(bilinear_config(mask, mu, nu, 0, 0, 0.5, std::move(beta)));
    }, py::arg("mask"), py::arg("mu"), py::arg("nu"), py::arg("beta") = py::none());

    m.def("shifted_quadratic_form", [](std::uint64_t mask, int mu, int nu, int rho, int K, bool clip) {
        auto q = shifted_quadratic_form(bilinear_config(mask, mu, nu, rho, K, 0.5, {}),
                                        clip ? ShiftPolicy::clip : ShiftPolicy::extend);
        return py::dict(py::arg("value") = q.value, py::arg("clipped") = q.clipped,
                        py::arg("prefactor") = q.prefactor);
    }, py::arg("mask"), py::arg("mu"), py::arg("nu"), py::arg("rho"), py::arg("K"), py::arg("clip") = false);

    m.def("carry_truncation_rate", [](int mu, int nu, int rho, int K, double epsilon) {
        auto c = carry_truncation_rate(bilinear_config(0, mu, nu, rho, K, epsilon, {}));
        return py::dict(py::arg("triples") = c.triples, py::arg("rate") = c.rate, py::arg("low_rate") = c.low_rate,
                        py::arg("high_rate") = c.high_rate, py::arg("predicted") = c.predicted,
                        py::arg("implied_constant") = c.implied_constant);
    }, py::arg("mu"), py::arg("nu"), py::arg("rho"), py::arg("K"), py::arg("epsilon") = 0.5);

    m.def("type1_sum", [](std::uint64_t mask, int mu, int nu) {
        return type1_sum(WalshMask(mask, mu + nu + 2), mu, nu);
    }, py::arg("mask"), py::arg("mu"), py::arg("nu"));

    m.def("frequency_test_count", [](std::uint64_t mask, int lambda, int mu, std::optional<double> threshold) {
        auto f = frequency_test_count(WalshMask(mask, lambda), mu, threshold);
        return py::dict(py::arg("value") = f.value, py::arg("bound") = f.bound, py::arg("threshold") = f.threshold,
                        py::arg("sup") = f.sup);
    }, py::arg("mask"), py::arg("lam"), py::arg("mu"), py::arg("threshold") = py::none());

    m.def("spectral_split", [](std::uint64_t mask, int lambda, int mu, int H) {
        SplitConfig c;
        c.mask = WalshMask(mask, lambda);
        c.mu = mu;
        c.H = H;
        auto s = spectral_split(c);
        return py::dict(py::arg("s1") = s.s1.bits(), py::arg("s2") = s.s2.bits(),
                        py::arg("frequencies") = s.frequencies, py::arg("coefficients") = s.coefficients,
                        py::arg("size_bound") = s.size_bound, py::arg("l1_error") = s.l1_error);
    }, py::arg("mask"), py::arg("lam"), py::arg("mu"), py::arg("H"));

    m.def("_emit_csv", [](const std::string& reports) {
        std::vector<CheckReport> rs;
        for (const auto& j : Json::parse(reports)) rs.push_back(report_from_json(j));
        return emit_csv(rs);
    });

    m.def("dispatch", [](std::vector<std::string> args) {
        std::ostringstream out, err;
        const int code = cli::dispatch(args, out, err);
        return py::make_tuple(code, out.str(), err.str());
    }, py::arg("args"), "Run a command-line invocation in process; returns (exit_code, stdout, stderr).");
}
