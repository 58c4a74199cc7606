#ifndef CVTEL_IO_HPP
#define CVTEL_IO_HPP

#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "cvtel/config.hpp"
#include "cvtel/protocols.hpp"

namespace cvtel {

/// Shortest round-trip decimal representation; keeps reruns byte-identical.
std::string format_double(double v);

struct RecordVariances {
    double var_x = 0.0;      // entangled: Var(x_4-x_5); single: Var(x) of the output
    double var_p_out = 0.0;  // entangled: Var(p_4+p_5); single: Var(p) of the output
    double var_p_in = 0.0;   // entangled: Var(p_1+p_2) of the input; single: Var(p) of the input
};

nlohmann::ordered_json record_to_json(const TeleportRecord& rec, const RecordVariances& vars);
nlohmann::ordered_json config_to_json(const RunConfig& cfg);

struct RunSummary {
    double mean_fidelity = 0.0;
    double std_error = 0.0;
    int n_runs = 0;
};
RunSummary summarize_fidelities(const std::vector<double>& fidelities);

/// records document: {config, records[], summary}
std::string teleport_document_json(const RunConfig& cfg,
                                   const std::vector<TeleportRecord>& records,
                                   const std::vector<RecordVariances>& vars);
std::string teleport_document_csv(const std::vector<TeleportRecord>& records,
                                  const std::vector<RecordVariances>& vars);

struct SweepRow {
    double value = 0.0;
    double mean_fidelity = 0.0;
    double std_error = 0.0;
    double var_x_diff = 0.0;
    double var_p_sum = 0.0;
};
std::string sweep_document_json(const RunConfig& cfg, const std::vector<SweepRow>& rows);
std::string sweep_document_csv(const std::vector<SweepRow>& rows);

struct BasesCheckRow {
    std::string family;
    double gram_deviation = 0.0;
    double completeness_deviation = 0.0;
};
std::string bases_document_json(const RunConfig& cfg, const std::vector<BasesCheckRow>& rows,
                                bool pass);
std::string bases_document_csv(const std::vector<BasesCheckRow>& rows);

void write_text_file(const std::string& path, const std::string& content);

} // namespace cvtel

#endif
