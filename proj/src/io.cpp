#include "cvtel/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace cvtel {

std::string format_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

nlohmann::ordered_json record_to_json(const TeleportRecord& rec, const RecordVariances& vars) {
    nlohmann::ordered_json j;
    j["protocol"] = rec.protocol == TeleportRecord::Protocol::Single ? "single" : "entangled";
    j["seed"] = rec.seed;
    j["outcome"] = {{"p", rec.classical_message[0]},
                    {"P", rec.classical_message[1]},
                    {"Q", rec.classical_message[2]}};
    j["density"] = rec.outcome.density;
    j["fidelity"] = rec.fidelity;
    j["variances"] = {{"var_x", vars.var_x},
                      {"var_p_out", vars.var_p_out},
                      {"var_p_in", vars.var_p_in}};
    return j;
}

nlohmann::ordered_json config_to_json(const RunConfig& cfg) {
    nlohmann::ordered_json j;
    j["grid.n_points"] = cfg.n_points;
    j["grid.extent"] = cfg.extent;
    j["resource.mode"] = cfg.resource_mode;
    j["resource.r"] = cfg.resource_r;
    j["input.profile"] = cfg.input_profile;
    j["input.center"] = cfg.input_center;
    j["input.width"] = cfg.input_width;
    j["input.seed"] = cfg.input_seed;
    j["input.q"] = cfg.input_q;
    j["seeds.base"] = cfg.seed_base;
    j["seeds.count"] = cfg.runs;
    j["output.format"] = cfg.format;
    j["basis"] = cfg.basis;
    return j;
}

RunSummary summarize_fidelities(const std::vector<double>& fidelities) {
    RunSummary s;
    s.n_runs = static_cast<int>(fidelities.size());
    if (fidelities.empty()) return s;
    double mean = 0.0;
    for (double f : fidelities) mean += f;
    mean /= fidelities.size();
    double var = 0.0;
    for (double f : fidelities) var += (f - mean) * (f - mean);
    var = fidelities.size() > 1 ? var / (fidelities.size() - 1.0) : 0.0;
    s.mean_fidelity = mean;
    s.std_error = std::sqrt(var / fidelities.size());
    return s;
}

std::string teleport_document_json(const RunConfig& cfg,
                                   const std::vector<TeleportRecord>& records,
                                   const std::vector<RecordVariances>& vars) {
    nlohmann::ordered_json doc;
    doc["config"] = config_to_json(cfg);
    doc["records"] = nlohmann::ordered_json::array();
    std::vector<double> fids;
    for (std::size_t i = 0; i < records.size(); ++i) {
        doc["records"].push_back(record_to_json(records[i], vars[i]));
        fids.push_back(records[i].fidelity);
    }
    const RunSummary s = summarize_fidelities(fids);
    doc["summary"] = {{"mean_fidelity", s.mean_fidelity},
                      {"std_error", s.std_error},
                      {"n_runs", s.n_runs}};
    return doc.dump(2) + "\n";
}

std::string teleport_document_csv(const std::vector<TeleportRecord>& records,
                                  const std::vector<RecordVariances>& vars) {
    std::ostringstream out;
    out << "protocol,seed,p,P,Q,density,fidelity,var_x,var_p_out,var_p_in\n";
    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto& r = records[i];
        out << (r.protocol == TeleportRecord::Protocol::Single ? "single" : "entangled") << ','
            << r.seed << ',' << format_double(r.classical_message[0]) << ','
            << format_double(r.classical_message[1]) << ','
            << format_double(r.classical_message[2]) << ',' << format_double(r.outcome.density)
            << ',' << format_double(r.fidelity) << ',' << format_double(vars[i].var_x) << ','
            << format_double(vars[i].var_p_out) << ',' << format_double(vars[i].var_p_in) << '\n';
    }
    return out.str();
}

std::string sweep_document_json(const RunConfig& cfg, const std::vector<SweepRow>& rows) {
    nlohmann::ordered_json doc;
    doc["config"] = config_to_json(cfg);
    doc["sweep"] = {{"parameter", cfg.sweep_parameter}};
    doc["rows"] = nlohmann::ordered_json::array();
    for (const auto& r : rows)
        doc["rows"].push_back({{"value", r.value},
                               {"mean_fidelity", r.mean_fidelity},
                               {"std_error", r.std_error},
                               {"var_x_diff", r.var_x_diff},
                               {"var_p_sum", r.var_p_sum}});
    return doc.dump(2) + "\n";
}

std::string sweep_document_csv(const std::vector<SweepRow>& rows) {
    std::ostringstream out;
    out << "value,mean_fidelity,std_error,var_x_diff,var_p_sum\n";
    for (const auto& r : rows)
        out << format_double(r.value) << ',' << format_double(r.mean_fidelity) << ','
            << format_double(r.std_error) << ',' << format_double(r.var_x_diff) << ','
            << format_double(r.var_p_sum) << '\n';
    return out.str();
}

std::string bases_document_json(const RunConfig& cfg, const std::vector<BasesCheckRow>& rows,
                                bool pass) {
    nlohmann::ordered_json doc;
    doc["config"] = config_to_json(cfg);
    doc["families"] = nlohmann::ordered_json::object();
    double worst = 0.0;
    for (const auto& r : rows) {
        doc["families"][r.family] = {{"gram_deviation", r.gram_deviation},
                                     {"completeness_deviation", r.completeness_deviation}};
        worst = std::max({worst, r.gram_deviation, r.completeness_deviation});
    }
    doc["max_deviation"] = worst;
    doc["pass"] = pass;
    return doc.dump(2) + "\n";
}

std::string bases_document_csv(const std::vector<BasesCheckRow>& rows) {
    std::ostringstream out;
    out << "family,gram_deviation,completeness_deviation\n";
    for (const auto& r : rows)
        out << r.family << ',' << format_double(r.gram_deviation) << ','
            << format_double(r.completeness_deviation) << '\n';
    return out.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file '" + path + "'");
    out << content;
    if (!out) throw std::runtime_error("failed writing output file '" + path + "'");
}

} // namespace cvtel
