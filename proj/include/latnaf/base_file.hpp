#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "latnaf/algebra.hpp"
#include "latnaf/errors.hpp"

namespace latnaf {

/// Base specification files are plain key-value text:
///   minpoly = a_0,a_1,...,a_{n-1}   (monic T^n + a_{n-1}T^{n-1} + ... + a_0)
///   label   = optional free text
/// Blank lines and lines starting with '#' are ignored.
inline AlgebraicBase load_base_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::IoFailure, "cannot open base file: " + path);
    std::vector<BigInt> coeffs;
    std::string label;
    std::string line;
    while (std::getline(in, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        auto trim = [](std::string s) {
            auto b = s.find_first_not_of(" \t\r");
            auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        std::string key = trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));
        if (key == "minpoly") {
            std::stringstream ss(val);
            std::string tok;
            while (std::getline(ss, tok, ',')) {
                tok = trim(tok);
                if (tok.empty())
                    throw Error(ErrorKind::UsageError, "empty minpoly coefficient in " + path);
                try {
                    coeffs.emplace_back(tok);
                } catch (const std::exception&) {
                    throw Error(ErrorKind::UsageError,
                                "bad minpoly coefficient '" + tok + "' in " + path);
                }
            }
        } else if (key == "label") {
            label = val;
        }
    }
    if (coeffs.empty())
        throw Error(ErrorKind::UsageError, "base file has no minpoly line: " + path);
    return load_base(coeffs, label);
}

}  // namespace latnaf
