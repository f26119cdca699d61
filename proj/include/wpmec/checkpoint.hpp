#pragma once

#include <string>

#include "wpmec/config.hpp"
#include "wpmec/trainer.hpp"

namespace wpmec {

/// Versioned binary dump of a Trainer: a JSON header (config, counters,
/// log, RNG state) followed by raw parameters, optimizer moments and replay
/// contents. Loading and continuing reproduces an uninterrupted run bit for
/// bit.
void save_checkpoint(const Trainer& t, const std::string& path);
Trainer load_checkpoint(const std::string& path);

/// Throws ConfigError when `eval` changes anything the trained networks
/// depend on (population sizes, observation layout, action space).
void check_compatible(const SimConfig& trained, const SimConfig& eval);

}  // namespace wpmec
