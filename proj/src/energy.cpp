#include "gkmeans/energy.hpp"

#include <filesystem>
#include <fstream>

namespace gkmeans {

namespace fs = std::filesystem;

namespace {

std::optional<std::string> read_line(const fs::path& p) {
    std::ifstream in(p);
    if (!in) return std::nullopt;
    std::string line;
    std::getline(in, line);
    if (!in && line.empty()) return std::nullopt;
    return line;
}

std::optional<std::uint64_t> read_u64(const fs::path& p) {
    const auto line = read_line(p);
    if (!line) return std::nullopt;
    try {
        return std::stoull(*line);
    } catch (...) {
        return std::nullopt;
    }
}

} // namespace

EnergyMeter::EnergyMeter(std::string powercap_root) {
    std::error_code ec;
    const fs::path root(powercap_root);
    if (!fs::is_directory(root, ec) || ec) {
        reason_ = "powercap sysfs not present at " + powercap_root;
        return;
    }

    for (const auto& entry : fs::directory_iterator(root, ec)) {
        if (ec) break;
        const fs::path dir = entry.path();
        if (dir.filename().string().rfind("intel-rapl", 0) != 0) continue;
        const auto name = read_line(dir / "name");
        const auto energy = read_u64(dir / "energy_uj");
        const auto range = read_u64(dir / "max_energy_range_uj");
        if (!name || !energy || !range) continue; // counter unreadable (often a permission issue)

        Domain d;
        d.energy_path = (dir / "energy_uj").string();
        d.max_range_uj = *range;
        d.is_dram = name->rfind("dram", 0) == 0;
        // only track package + dram; skip core/uncore subdomains
        if (d.is_dram || name->rfind("package", 0) == 0 || name->rfind("psys", 0) == 0) {
            domains_.push_back(std::move(d));
        }
    }

    if (domains_.empty()) {
        reason_ = "no readable rapl domains under " + powercap_root +
                  " (missing hardware or permission denied)";
        return;
    }
    supported_ = true;
}

EnergyMeter::Snapshot EnergyMeter::snapshot() const {
    Snapshot snap;
    snap.energy_uj.reserve(domains_.size());
    for (const Domain& d : domains_) {
        snap.energy_uj.push_back(read_u64(d.energy_path).value_or(0));
    }
    return snap;
}

EnergySample EnergyMeter::delta(const Snapshot& start, const Snapshot& end) const {
    EnergySample sample;
    for (std::size_t i = 0; i < domains_.size(); ++i) {
        if (i >= start.energy_uj.size() || i >= end.energy_uj.size()) break;
        const std::uint64_t a = start.energy_uj[i];
        const std::uint64_t b = end.energy_uj[i];
        std::uint64_t duj = 0;
        if (b >= a) {
            duj = b - a;
        } else {
            // counter wrapped at max_energy_range_uj
            duj = domains_[i].max_range_uj - a + b;
        }
        const double joules = static_cast<double>(duj) * 1e-6;
        if (domains_[i].is_dram) {
            sample.dram_j += joules;
        } else {
            sample.package_j += joules;
        }
    }
    return sample;
}

} // namespace gkmeans
