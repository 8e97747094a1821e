#pragma once

#include "protpat/network.hpp"
#include "protpat/patterns.hpp"

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <string>
#include <utility>
#include <vector>

namespace fixtures {

inline protpat::Network network(std::initializer_list<std::pair<const char*, const char*>> lines, int multiplicity = 1)
{
    std::vector<protpat::NetworkLine> out;
    for (const auto& [a, b] : lines) out.push_back({protpat::BusPair(a, b), multiplicity});
    return protpat::Network::from_lines(out);
}

/// Pattern from "A-B" edge names.
inline protpat::Pattern pattern(const protpat::Network& net, std::initializer_list<const char*> edges)
{
    protpat::Pattern p;
    for (const char* e : edges) p.lines.push_back(protpat::parse_edge(net, e));
    std::sort(p.lines.begin(), p.lines.end());
    return p;
}

/// Square grid of side `n` named R<row>C<col>.
inline protpat::Network grid(int n)
{
    std::vector<protpat::NetworkLine> out;
    auto name = [](int r, int c) { return "R" + std::to_string(r) + "C" + std::to_string(c); };
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) {
            if (c + 1 < n) out.push_back({protpat::BusPair(name(r, c), name(r, c + 1)), 1});
            if (r + 1 < n) out.push_back({protpat::BusPair(name(r, c), name(r + 1, c)), 1});
        }
    return protpat::Network::from_lines(out);
}

/// Fresh empty directory under the system temp directory.
inline std::filesystem::path temp_dir(const std::string& name)
{
    auto dir = std::filesystem::temp_directory_path() / ("protpat_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

inline void write_file(const std::filesystem::path& path, const std::string& content)
{
    std::ofstream(path, std::ios::binary) << content;
}

inline std::string read_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace fixtures
