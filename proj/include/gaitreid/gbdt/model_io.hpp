#pragma once

#include "gaitreid/gbdt/ensemble.hpp"

#include <filesystem>
#include <string>

namespace gaitreid::gbdt {

/// Versioned JSON model document. Doubles are written in shortest round-trip form, so
/// save -> load -> save is byte-stable and identical models give identical files.
std::string to_json_text(const BoostedEnsemble& model);
/// Throws CompatibilityError on malformed documents or unsupported versions.
BoostedEnsemble from_json_text(const std::string& text);

void save_model(const std::filesystem::path& path, const BoostedEnsemble& model);
BoostedEnsemble load_model(const std::filesystem::path& path);

}  // namespace gaitreid::gbdt
