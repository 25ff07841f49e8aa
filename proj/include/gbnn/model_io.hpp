#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "gbnn/booster.hpp"
#include "gbnn/dataset.hpp"
#include "gbnn/flat_network.hpp"

namespace gbnn {

// Versioned JSON model documents; docs/model_format.md is the reference.
// Doubles are written as the shortest decimal that reads back exactly, so
// a save/load cycle reproduces every weight bit for bit.

inline constexpr int kFormatMajor = 1;
inline constexpr int kFormatMinor = 0;

/// Trained ensemble plus, optionally, the preprocessing it was trained with.
struct EnsembleFile {
    BoostedEnsemble model;
    std::optional<FeatureSchema> schema;

    friend bool operator==(const EnsembleFile&, const EnsembleFile&) = default;
};

struct FlatNetworkFile {
    FlatNetwork net;
    std::optional<TrainConfig> train_config;
    std::vector<double> training_log;
    std::optional<FeatureSchema> schema;

    friend bool operator==(const FlatNetworkFile&, const FlatNetworkFile&) = default;
};

enum class ModelKind { Ensemble, FlatNetwork };

void write_ensemble(std::ostream& out, const EnsembleFile& file);
void write_flat_network(std::ostream& out, const FlatNetworkFile& file);

/// Throws LoadError naming the offending field on malformed, truncated or
/// inconsistent input and on an unsupported major version.
EnsembleFile read_ensemble(std::istream& in);
FlatNetworkFile read_flat_network(std::istream& in);
ModelKind read_kind(std::istream& in);

void save_ensemble(const std::string& path, const EnsembleFile& file);
void save_flat_network(const std::string& path, const FlatNetworkFile& file);
EnsembleFile load_ensemble(const std::string& path);
FlatNetworkFile load_flat_network(const std::string& path);
ModelKind load_kind(const std::string& path);

/// Flat-network file derived from an ensemble file.
FlatNetworkFile flatten_file(const EnsembleFile& file);

}  // namespace gbnn
