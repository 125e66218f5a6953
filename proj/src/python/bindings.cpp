#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "mathverify/baseline.hpp"
#include "mathverify/extract.hpp"
#include "mathverify/metrics.hpp"
#include "mathverify/pipeline.hpp"

namespace py = pybind11;
using namespace mathverify;

PYBIND11_MODULE(_core, m) {
    m.doc() = "Math answer verification core: extraction, symbolic baseline, pass@k";

    m.def(
        "extract_final_answer",
        [](const std::string& response, const std::string& fallback,
           std::size_t max_scan_bytes) -> std::optional<std::string> {
            ExtractionPolicy policy;
            if (fallback == "none")
                policy.fallback = Fallback::None;
            else if (fallback == "last_number")
                policy.fallback = Fallback::LastNumber;
            else if (fallback == "answer_phrase")
                policy.fallback = Fallback::AnswerPhrase;
            else
                throw py::value_error("fallback must be none, last_number or answer_phrase");
            policy.max_scan_bytes = max_scan_bytes;
            return extract_final_answer(response, policy);
        },
        py::arg("response"), py::arg("fallback") = "none", py::arg("max_scan_bytes") = 0,
        "Extract the content of the last \\boxed{...} region, or apply the fallback.");

    m.def(
        "normalize_answer_key",
        [](const std::string& answer) { return normalize_answer_key(answer); }, py::arg("answer"),
        "Canonical key used for answer uniqueness grouping.");

    m.def(
        "baseline_equivalent",
        [](const std::string& gt, const std::string& pred, double abs_tol, double rel_tol,
           bool strip_percent) {
            BaselineConfig cfg{abs_tol, rel_tol, strip_percent};
            return baseline_equivalent(gt, pred, cfg) == Decision::Correct;
        },
        py::arg("gt"), py::arg("pred"), py::arg("abs_tol") = 1e-9, py::arg("rel_tol") = 1e-9,
        py::arg("strip_percent") = true,
        "Rule-based literal comparison (the characterized symbolic arm).");

    m.def("pass_at_k", &pass_at_k, py::arg("n"), py::arg("c"), py::arg("k"),
          "Unbiased pass@k estimate from n samples with c correct.");

    m.def("f1", &f1, py::arg("precision"), py::arg("recall"));

    m.def(
        "curve",
        [](const std::vector<std::pair<int, int>>& stats, const std::vector<int>& ks) {
            std::vector<SampleStats> s;
            int i = 0;
            for (auto [n, c] : stats) s.push_back({"q" + std::to_string(i++), n, c});
            PassAtKCurve result = curve(s, ks);
            return std::make_pair(result.ks, result.values);
        },
        py::arg("stats"), py::arg("ks"),
        "Mean pass@k over a list of (n, c) pairs for each requested k.");

    m.def("split_seed", &split_seed, py::arg("seed"), py::arg("question_id"), py::arg("rep"),
          "Deterministic per-(question, repetition) shuffle seed.");
}
