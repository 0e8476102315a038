#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace gkmeans {

/// Joules consumed over a window, split by RAPL domain. "package" covers the
/// CPU socket counters, "dram" the memory ones.
struct EnergySample {
    double package_j = 0.0;
    double dram_j = 0.0;
};

/// Reads the powercap sysfs layout (cumulative microjoule counters plus a
/// max-range file per domain). When the layout is missing or unreadable the
/// meter reports itself unsupported with a reason and callers proceed without
/// energy columns; energy never gates anything.
class EnergyMeter {
public:
    explicit EnergyMeter(std::string powercap_root = "/sys/class/powercap");

    bool supported() const { return supported_; }
    const std::string& unsupported_reason() const { return reason_; }

    struct Snapshot {
        std::vector<std::uint64_t> energy_uj; // one per domain, same order as domains_
    };

    Snapshot snapshot() const;

    /// Delta between two snapshots; counter wraparound is corrected with the
    /// per-domain max range, so the result is always non-negative.
    EnergySample delta(const Snapshot& start, const Snapshot& end) const;

private:
    struct Domain {
        std::string energy_path;
        std::uint64_t max_range_uj = 0;
        bool is_dram = false;
    };
    bool supported_ = false;
    std::string reason_;
    std::vector<Domain> domains_;
};

} // namespace gkmeans
