#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

namespace ergoswitch::cli {

enum class Stage { parabolic, elliptic, ergodic, dualgame, all };

Stage parse_stage(const std::string& text);

struct RunOptions {
    Stage stage = Stage::all;
    std::optional<std::uint64_t> seed;  // overrides [mc] seed
    std::optional<std::filesystem::path> out_dir;
    bool force = false;  // run even if validation fails
};

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int failure = 1;
inline constexpr int usage = 2;
}  // namespace exit_code

int cmd_validate(const std::filesystem::path& config, std::ostream& out, std::ostream& err);
int cmd_run(const std::filesystem::path& config, const RunOptions& options, std::ostream& out,
            std::ostream& err);

}  // namespace ergoswitch::cli
