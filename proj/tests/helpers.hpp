#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "normalkit/curves.hpp"
#include "normalkit/triangulation.hpp"

namespace testutil {

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline std::string corpus_path(const std::string& name) {
    return std::string(NORMALKIT_CORPUS_DIR) + "/" + name;
}

inline normalkit::Triangulation load_corpus(const std::string& name) {
    return normalkit::parse_triangulation(read_file(corpus_path(name)));
}

inline std::vector<std::string> corpus_names() {
    return {"one_tet_a.tri", "two_tet_a.tri", "two_tet_b.tri", "three_tet_a.tri",
            "four_tet_a.tri"};
}

inline std::vector<std::string> corpus_names_small() {
    return {"one_tet_a.tri", "two_tet_a.tri", "two_tet_b.tri", "three_tet_a.tri"};
}

}  // namespace testutil
