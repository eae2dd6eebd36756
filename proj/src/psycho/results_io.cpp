#include "ocular/psycho/results_io.hpp"

#include <algorithm>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace ocular::psycho {

using nlohmann::json;

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        cell.erase(std::remove(cell.begin(), cell.end(), '\r'), cell.end());
        cells.push_back(cell);
    }
    return cells;
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

void write_results_csv(std::ostream& out, std::span<const TrialResult> results) {
    out << "trial_index,absolute_d,offset_d,relative_d,correct,replication\n";
    for (const auto& r : results) {
        out << r.trial_index << ',' << fmt(r.absolute_d) << ',' << fmt(r.offset_d) << ',' << fmt(r.relative_d) << ','
            << (r.correct ? 1 : 0) << ',' << r.replication << '\n';
    }
}

std::vector<TrialResult> read_results_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) {
        throw std::invalid_argument("results CSV is empty");
    }
    const auto header = split_csv_line(line);
    const auto column = [&](const std::string& name, bool required) -> long {
        const auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end()) {
            if (required) throw std::invalid_argument("results CSV lacks column '" + name + "'");
            return -1;
        }
        return it - header.begin();
    };
    const long c_trial = column("trial_index", true);
    const long c_abs = column("absolute_d", true);
    const long c_off = column("offset_d", true);
    const long c_rel = column("relative_d", true);
    const long c_ok = column("correct", true);
    const long c_rep = column("replication", false);

    std::vector<TrialResult> out;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        const auto cells = split_csv_line(line);
        if (cells.size() != header.size()) {
            throw std::invalid_argument("results CSV line " + std::to_string(line_no) + ": wrong column count");
        }
        try {
            TrialResult r;
            r.trial_index = std::stoul(cells[c_trial]);
            r.absolute_d = std::stod(cells[c_abs]);
            r.offset_d = std::stod(cells[c_off]);
            r.relative_d = std::stod(cells[c_rel]);
            const auto ok = cells[c_ok];
            if (ok != "0" && ok != "1") throw std::invalid_argument("correct must be 0 or 1");
            r.correct = ok == "1";
            r.replication = c_rep >= 0 ? std::stoul(cells[c_rep]) : 0;
            out.push_back(r);
        } catch (const std::logic_error& e) {
            throw std::invalid_argument("results CSV line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return out;
}

SimulatedObserver observer_from_json(const json& j) {
    if (!j.is_object()) throw std::invalid_argument("observer must be a JSON object");
    SimulatedObserver o;
    for (const auto& [key, value] : j.items()) {
        if (key == "threshold") o.detection_threshold_d = value.get<double>();
        else if (key == "spread" || key == "slope") o.spread_d = value.get<double>();
        else if (key == "lapse") o.lapse_rate = value.get<double>();
        else if (key == "weber") o.weber_fraction = value.get<double>();
        else if (key == "intercept") o.intercept_d = value.get<double>();
        else if (key == "seed") o.rng_seed = value.get<std::uint64_t>();
        else throw std::invalid_argument("unknown observer key '" + key + "'");
    }
    o.validate();
    return o;
}

json observer_to_json(const SimulatedObserver& o) {
    return {{"threshold", o.detection_threshold_d}, {"spread", o.spread_d}, {"lapse", o.lapse_rate},
            {"weber", o.weber_fraction},           {"intercept", o.intercept_d}, {"seed", o.rng_seed}};
}

json fit_to_json(const PsychometricFit& f) {
    return {{"alpha", f.params.alpha},
            {"beta", f.params.beta},
            {"lapse", f.params.lapse},
            {"guess_rate", f.guess_rate},
            {"log_likelihood", f.log_likelihood},
            {"threshold75", f.threshold75},
            {"reliable", f.reliable}};
}

json analyses_to_json(std::span<const SessionAnalysis> analyses) {
    json doc;
    doc["experiment"] = analyses.empty() ? "detection" : std::string(to_string(analyses.front().experiment));
    doc["replications"] = json::array();
    std::vector<double> means, slopes, intercepts;
    for (const auto& a : analyses) {
        json rep;
        rep["replication"] = a.replication;
        rep["groups"] = json::array();
        for (const auto& g : a.groups) {
            json entry = fit_to_json(g.fit);
            entry["group_d"] = g.group_d;
            rep["groups"].push_back(entry);
        }
        rep["mean_threshold"] = a.mean_threshold;
        means.push_back(a.mean_threshold);
        if (a.experiment == Experiment::discrimination) {
            rep["linear_fit"] = {{"slope", a.linear.slope}, {"intercept_d", a.linear.intercept_d}};
            slopes.push_back(a.linear.slope);
            intercepts.push_back(a.linear.intercept_d);
        }
        doc["replications"].push_back(rep);
    }
    if (!means.empty()) {
        doc["summary"]["median_threshold"] = median(means);
        if (!slopes.empty()) {
            doc["summary"]["median_slope"] = median(slopes);
            doc["summary"]["median_intercept_d"] = median(intercepts);
        }
    }
    return doc;
}

}  // namespace ocular::psycho
