#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mda/core.hpp"
#include "mda/enumerate.hpp"
#include "mda/flow.hpp"
#include "mda/packet.hpp"
#include "mda/returns.hpp"
#include "mda/stats.hpp"

namespace mda {

// Shortest round-trip decimal form; locale-free and byte-stable.
std::string format_double(double v);

// FNV-1a over the canonical serialization; embedded in every output.
std::uint64_t fnv1a(const std::string& s);

struct OutputMeta {
    std::string schema;
    std::string config_text;   // canonical flat key=value serialization
    std::uint64_t seed = 0;
};

std::string stream_csv(const ApproximateStream& stream, const Target& target,
                       const Decomposition& dec, const NormSpec& norms);
std::string packets_csv(const std::vector<Packet>& packets, const Decomposition& dec,
                        const Params& params);
std::string visits_csv(const std::vector<VisitRecord>& records,
                       const ApproximateStream& stream, const Decomposition& dec);
std::string series_csv(const ReturnSeries& series);
std::string reports_json(const std::vector<TestReport>& reports, const OutputMeta& meta);
std::string sidecar_json(const OutputMeta& meta, long long members, long long degenerate);

// Serializes rows as a JSON array of objects instead of CSV (--format json).
std::string csv_to_json_rows(const std::string& csv, const OutputMeta& meta);

void write_file(const std::string& path, const std::string& content);

} // namespace mda
