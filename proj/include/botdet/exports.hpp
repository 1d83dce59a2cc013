#pragma once

#include <map>
#include <string>
#include <vector>

#include "botdet/attribution.hpp"
#include "botdet/config.hpp"
#include "botdet/synth.hpp"

namespace botdet {

// Artifact serializers. Everything is rendered to a string first and written
// atomically (temp file + rename), so identical inputs produce identical
// bytes and interrupted runs never leave half files.

std::string histogram_csv(const DeltaHistogram& histogram, const std::string& config_hash);
std::string degree_csv(const std::map<uint32_t, uint64_t>& dist, const std::string& config_hash);
std::string fit_json(const PowerLawFit& fit, const std::string& config_hash);
std::string spikes_json(const std::vector<Spike>& spikes, const std::string& config_hash);
std::string anomalies_json(const std::vector<SpikeClassification>& classifications,
                           const std::string& config_hash);
std::string report_json(const BotReport& report,
                        const std::vector<SpikeClassification>& classifications,
                        const std::vector<SpikeCluster>& clusters, const PowerLawFit& fit,
                        const Dataset& ds, const RunConfig& cfg);
std::string fit_plot_tsv(const DeltaHistogram& histogram, const PowerLawFit& fit,
                         const std::string& config_hash);
std::string recurrence_tsv(const std::vector<WindowProbe>& probes,
                           const std::string& config_hash);
std::string dataset_csv(const Dataset& ds);
std::string dataset_jsonl(const Dataset& ds);
std::string truth_csv(const GroundTruth& truth);

void write_file_atomic(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

}  // namespace botdet
