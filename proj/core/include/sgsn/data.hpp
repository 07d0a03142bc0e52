#pragma once

#include <sgsn/linops.hpp>

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace sgsn {

/// Samples in rows. `labels` is q×1 for binary data and q×ℓ for multi-label
/// data; all label entries are −1 or +1.
struct Dataset {
    Matrix features;
    Matrix labels;
    bool multilabel = false;

    Index num_samples() const noexcept { return features.rows(); }
    Index num_features() const noexcept { return features.cols(); }
    Index num_labels() const noexcept { return labels.cols(); }

    Dataset subset(std::span<const Index> rows) const;

    /// Rows of the binary label vector equal to +1 / −1.
    Matrix positives() const;
    Matrix negatives() const;
};

class ParseError : public std::runtime_error {
  public:
    ParseError(const std::string &what, std::size_t line)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

  private:
    std::size_t line_;
};

enum class LabelFormat {
    /// One numeric label per line; −1/0 map to −1 and +1 to +1.
    binary,
    /// Comma-separated 0-based indices of the positive labels, possibly
    /// empty; every other label is −1.
    multilabel,
};

struct LibsvmOptions {
    LabelFormat format = LabelFormat::binary;
    /// Lower bounds; the actual sizes are the larger of these and what the
    /// file contains.
    Index min_features = 0;
    Index min_labels = 0;
};

/// Parses "<label> idx:val idx:val ..." lines with 1-based feature indices.
/// Unlisted features are 0. Throws ParseError on malformed input.
Dataset parse_libsvm(std::istream &in, const LibsvmOptions &opts = {});
Dataset load_libsvm(const std::filesystem::path &path, const LibsvmOptions &opts = {});

/// Writes only nonzero features, with 17 significant digits.
void write_libsvm(std::ostream &out, const Dataset &ds);
void save_libsvm(const std::filesystem::path &path, const Dataset &ds);

/// Per-column affine map onto [−1, 1], fit on one matrix and applied to
/// others. Constant columns map to 0.
class FeatureScaler {
  public:
    static FeatureScaler fit(const Matrix &X);
    Matrix apply(const Matrix &X) const;

  private:
    Vector lo_, hi_;
};

/// Fits the scaler on `ds` itself and applies it.
Dataset scale_features(const Dataset &ds);

/// Two Gaussian classes N(μ₁, Λ₁) and N(μ₂, Λ₂) with μ entries ~ N(0, 1) and
/// diagonal Λ entries ~ |N(0, 1)|. q₊ = ⌈pq⌉ positives are listed first. With
/// r > 0, ⌊r q₊⌋ randomly chosen samples of each class get the opposite label.
Dataset gen_example1(Index q, Index n, double p, double r, std::uint64_t seed);

/// C = [C̄, e] with C̄ ~ N(0, 1), W ~ U(−1, 1), Y = sgn(CW) with sgn(0) = −1.
/// The weight matrix is written to `W` when given.
Dataset gen_example3(Index q, Index d, Index l, std::uint64_t seed, Matrix *W = nullptr);

struct SplitSpec {
    enum class Kind { kfold, holdout };
    Kind kind = Kind::kfold;
    int k = 5;
    double train_fraction = 0.9;
    std::uint64_t seed = 0;
    bool stratified = true;

    static SplitSpec kfold(int k, std::uint64_t seed, bool stratified = true) {
        return {Kind::kfold, k, 0.0, seed, stratified};
    }
    static SplitSpec holdout(double train_fraction, std::uint64_t seed, bool stratified = true) {
        return {Kind::holdout, 0, train_fraction, seed, stratified};
    }
};

struct Fold {
    std::vector<Index> train;
    std::vector<Index> test;
};

/// k folds whose test sets partition [0, q), or a single train/test split.
/// Stratified splits keep class (binary) or per-label positive proportions
/// close to the global ones using a greedy allocator. Conditions worth a
/// warning (a class missing from a test fold) are appended to `warnings`.
std::vector<Fold> make_folds(const Dataset &ds, const SplitSpec &spec,
                             std::vector<std::string> *warnings = nullptr);

} // namespace sgsn
