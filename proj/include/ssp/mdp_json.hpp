#pragma once

#include "ssp/mdp.hpp"

#include <filesystem>
#include <string>

namespace ssp {

// MDP file format (JSON):
//   { "n": int, "actions": [string, ...],
//     "transitions": [[[real, ...], ...], ...],   // [state-1][action][next-1]
//     "costs": [[real, ...], ...] }                // [state-1][action]
// Terminal mass is implicit.

/// Parses and validates. Throws ValidationError naming the first problem
/// (shape errors and validate() violations alike).
Mdp parse_mdp_json(const std::string& text);
Mdp load_mdp(const std::filesystem::path& path);

std::string mdp_to_json(const Mdp& mdp);
void save_mdp(const Mdp& mdp, const std::filesystem::path& path);

} // namespace ssp
