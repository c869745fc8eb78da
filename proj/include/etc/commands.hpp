#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <vector>

#include "etc/simulation.hpp"

namespace etc {

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int io = 1;
inline constexpr int infeasible = 2;
inline constexpr int invariant = 3;
inline constexpr int usage = 64;
}  // namespace exit_code

struct Streams {
    std::ostream& out;
    std::ostream& err;
};

/// ETC_SEED, when set to an unsigned integer.
std::optional<std::uint64_t> seed_from_env();

int cmd_synth(const std::filesystem::path& config, const std::filesystem::path& gains_out, Streams io);
int cmd_verify(const std::filesystem::path& config, const std::filesystem::path& gains, Streams io);
int cmd_run(const std::filesystem::path& config, const std::filesystem::path& gains, std::optional<std::uint64_t> seed,
            const std::filesystem::path& out_dir, Streams io, Protocol protocol = Protocol::proposed);
int cmd_compare(const std::filesystem::path& config, const std::filesystem::path& gains,
                const std::vector<std::uint64_t>& seeds, Streams io);
int cmd_demo(const std::filesystem::path& out_dir, Streams io);

/// File names written under <out>/series by cmd_demo.
std::vector<std::string> demo_series_files();

}  // namespace etc
