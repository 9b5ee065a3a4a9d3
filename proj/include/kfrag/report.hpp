// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <fstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "kfrag/error.hpp"
#include "kfrag/eval.hpp"

// JSON rendering of an EvalReport plus CSV exports. Column schemas are
// listed in docs/format.md.

namespace kfrag {

namespace detail {

inline nlohmann::json num(double v) { return std::isnan(v) ? nlohmann::json(nullptr) : nlohmann::json(v); }

inline nlohmann::json nums(const std::vector<double>& v)
{
    auto a = nlohmann::json::array();
    for (double x : v)
        a.push_back(num(x));
    return a;
}

}  // namespace detail

inline nlohmann::json to_json(const EvalReport& r)
{
    using nlohmann::json;
    json j;
    j["format"] = "kfrag-eval/1";
    j["parameters"] = {{"k_values", r.config.k_values},
                       {"trials", r.config.trials},
                       {"fragment_size", r.config.fragment_size},
                       {"q", r.config.q},
                       {"recurrence_delay", r.config.recurrence_delay},
                       {"input_size", r.input_size},
                       {"chi2_threshold", kChiSquaredThreshold},
                       {"pairing", r.pairing}};
    j["original"] = {{"entropy", r.original_entropy},
                     {"pdf", std::vector<double>(r.original_pdf.begin(), r.original_pdf.end())}};
    auto per_k = json::array();
    for (const auto& ke : r.per_k) {
        json corr = json::array();
        for (const auto& row : ke.corr_fragments)
            corr.push_back(detail::nums(row));
        per_k.push_back({{"k", ke.k},
                         {"trials", ke.trials},
                         {"fragment_entropy", ke.fragment_entropy},
                         {"mean_fragment_entropy", ke.mean_fragment_entropy},
                         {"min_fragment_entropy", ke.min_fragment_entropy},
                         {"result_entropy", ke.result_entropy},
                         {"ida_result_entropy", ke.ida_result_entropy},
                         {"original_sample_entropy", ke.original_sample_entropy},
                         {"chi2_fragment_size", ke.chi2_fragment_size},
                         {"chi2_statistics", ke.chi2_statistics},
                         {"chi2_pass_rate", ke.chi2_pass_rate},
                         {"fragment_pdf", std::vector<double>(ke.fragment_pdf.begin(), ke.fragment_pdf.end())},
                         {"corr_original_fragment", detail::nums(ke.corr_original_fragment)},
                         {"corr_fragments", corr},
                         {"mean_corr_original", detail::num(ke.mean_corr_original)},
                         {"mean_corr_inter", detail::num(ke.mean_corr_inter)},
                         {"bit_difference", ke.bit_difference},
                         {"mean_bit_difference", ke.mean_bit_difference}});
    }
    j["per_k"] = per_k;
    if (r.seed)
        j["seed_sensitivity"] = {{"bit_difference", r.seed->bit_difference},
                                 {"correlation", r.seed->correlation},
                                 {"flipped_bit", r.seed->flipped_bit}};
    j["recurrence_exports"] = r.recurrence_paths;
    auto verdicts = json::array();
    for (const auto& v : summarize(r))
        verdicts.push_back({{"metric", v.metric}, {"pass", v.pass}, {"detail", v.detail}});
    j["verdicts"] = verdicts;
    return j;
}

namespace detail {

inline std::ofstream open_out(const std::string& path)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw std::ios_base::failure("cannot open " + path + " for writing");
    return out;
}

}  // namespace detail

inline void write_recurrence_csv(const std::string& path, const std::vector<RecurrencePair>& pts)
{
    auto out = detail::open_out(path);
    out << "value_i,value_i_plus_t\n";
    for (const auto& [a, b] : pts)
        out << unsigned(a) << ',' << unsigned(b) << '\n';
}

/// Writes entropy.csv, pdf.csv and recurrence_k<k>_{original,fragment}.csv
/// into dir and records the recurrence paths in the report.
inline void write_csv_exports(EvalReport& r, const std::string& dir)
{
    {
        auto out = detail::open_out(dir + "/entropy.csv");
        out << "k,source,entropy\n";
        for (const auto& ke : r.per_k) {
            for (std::size_t j = 0; j < ke.fragment_entropy.size(); ++j)
                out << ke.k << ",fragment" << (j + 1) << ',' << ke.fragment_entropy[j] << '\n';
            out << ke.k << ",result," << ke.result_entropy << '\n';
            out << ke.k << ",ida_result," << ke.ida_result_entropy << '\n';
            out << ke.k << ",original_sample," << ke.original_sample_entropy << '\n';
        }
    }
    {
        auto out = detail::open_out(dir + "/pdf.csv");
        out << "k,source,value,probability\n";
        for (std::size_t v = 0; v < 256; ++v)
            out << "0,original," << v << ',' << r.original_pdf[v] << '\n';
        for (const auto& ke : r.per_k)
            for (std::size_t v = 0; v < 256; ++v)
                out << ke.k << ",fragments," << v << ',' << ke.fragment_pdf[v] << '\n';
    }
    r.recurrence_paths.clear();
    for (const auto& ke : r.per_k) {
        const std::string base = dir + "/recurrence_k" + std::to_string(ke.k);
        write_recurrence_csv(base + "_original.csv", ke.recurrence_original);
        write_recurrence_csv(base + "_fragment.csv", ke.recurrence_fragment);
        r.recurrence_paths.push_back(base + "_original.csv");
        r.recurrence_paths.push_back(base + "_fragment.csv");
    }
}

}  // namespace kfrag
