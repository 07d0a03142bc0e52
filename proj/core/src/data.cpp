#include <sgsn/data.hpp>
#include <sgsn/rng.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>
#include <string_view>

namespace sgsn {

Dataset Dataset::subset(std::span<const Index> rows) const {
    Dataset out;
    out.multilabel = multilabel;
    out.features.resize(static_cast<Index>(rows.size()), features.cols());
    out.labels.resize(static_cast<Index>(rows.size()), labels.cols());
    for (std::size_t k = 0; k < rows.size(); ++k) {
        out.features.row(static_cast<Index>(k)) = features.row(rows[k]);
        out.labels.row(static_cast<Index>(k)) = labels.row(rows[k]);
    }
    return out;
}

namespace {

Matrix rows_with_label(const Dataset &ds, double label) {
    if (ds.multilabel || ds.labels.cols() != 1)
        throw std::invalid_argument("Dataset: binary labels required");
    std::vector<Index> rows;
    for (Index i = 0; i < ds.num_samples(); ++i)
        if (ds.labels(i, 0) == label)
            rows.push_back(i);
    Matrix X(static_cast<Index>(rows.size()), ds.num_features());
    for (std::size_t k = 0; k < rows.size(); ++k)
        X.row(static_cast<Index>(k)) = ds.features.row(rows[k]);
    return X;
}

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos)
        return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

template <class T> bool parse_number(std::string_view tok, T &out) {
    if (!tok.empty() && tok.front() == '+')
        tok.remove_prefix(1);
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), out);
    return ec == std::errc{} && ptr == tok.data() + tok.size();
}

struct ParsedLine {
    std::vector<Index> labels; // multilabel: positive label indices
    double binary_label = 0;
    std::vector<std::pair<Index, double>> entries; // 0-based
};

} // namespace

Matrix Dataset::positives() const { return rows_with_label(*this, 1.0); }
Matrix Dataset::negatives() const { return rows_with_label(*this, -1.0); }

Dataset parse_libsvm(std::istream &in, const LibsvmOptions &opts) {
    std::vector<ParsedLine> lines;
    Index max_feature = opts.min_features;
    Index max_label = opts.min_labels;
    std::string raw;
    std::size_t lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        std::string_view line = raw;
        if (const auto hash = line.find('#'); hash != std::string_view::npos)
            line = line.substr(0, hash);
        line = trim(line);
        if (line.empty())
            continue;

        std::vector<std::string_view> tokens;
        std::size_t pos = 0;
        while (pos < line.size()) {
            const auto end = line.find_first_of(" \t", pos);
            const auto tok = line.substr(pos, end == std::string_view::npos ? line.size() - pos
                                                                            : end - pos);
            if (!tok.empty())
                tokens.push_back(tok);
            if (end == std::string_view::npos)
                break;
            pos = end + 1;
        }

        ParsedLine pl;
        std::size_t first_feature = 0;
        if (opts.format == LabelFormat::binary) {
            if (tokens.front().find(':') != std::string_view::npos)
                throw ParseError("missing label", lineno);
            double label;
            if (!parse_number(tokens.front(), label))
                throw ParseError("invalid label '" + std::string(tokens.front()) + "'", lineno);
            if (label == 1)
                pl.binary_label = 1;
            else if (label == -1 || label == 0)
                pl.binary_label = -1;
            else
                throw ParseError("binary label must be -1, 0 or +1", lineno);
            first_feature = 1;
        } else if (tokens.front().find(':') == std::string_view::npos) {
            std::string_view list = tokens.front();
            while (!list.empty()) {
                const auto comma = list.find(',');
                const auto tok = list.substr(0, comma);
                Index label;
                if (!parse_number(tok, label) || label < 0)
                    throw ParseError("invalid label index '" + std::string(tok) + "'", lineno);
                pl.labels.push_back(label);
                max_label = std::max(max_label, label + 1);
                if (comma == std::string_view::npos)
                    break;
                list.remove_prefix(comma + 1);
            }
            first_feature = 1;
        }

        for (std::size_t t = first_feature; t < tokens.size(); ++t) {
            const auto colon = tokens[t].find(':');
            if (colon == std::string_view::npos)
                throw ParseError("expected idx:val, got '" + std::string(tokens[t]) + "'", lineno);
            Index idx;
            double val;
            if (!parse_number(tokens[t].substr(0, colon), idx) || idx < 1)
                throw ParseError("invalid feature index in '" + std::string(tokens[t]) + "'", lineno);
            if (!parse_number(tokens[t].substr(colon + 1), val) || !std::isfinite(val))
                throw ParseError("invalid feature value in '" + std::string(tokens[t]) + "'", lineno);
            pl.entries.emplace_back(idx - 1, val);
            max_feature = std::max(max_feature, idx);
        }
        std::vector<Index> seen;
        for (const auto &[idx, val] : pl.entries)
            seen.push_back(idx);
        std::sort(seen.begin(), seen.end());
        if (std::adjacent_find(seen.begin(), seen.end()) != seen.end())
            throw ParseError("duplicate feature index", lineno);
        lines.push_back(std::move(pl));
    }

    Dataset ds;
    ds.multilabel = opts.format == LabelFormat::multilabel;
    const auto q = static_cast<Index>(lines.size());
    ds.features = Matrix::Zero(q, max_feature);
    ds.labels = Matrix::Constant(q, ds.multilabel ? max_label : 1, -1.0);
    for (Index i = 0; i < q; ++i) {
        const auto &pl = lines[static_cast<std::size_t>(i)];
        for (const auto &[idx, val] : pl.entries)
            ds.features(i, idx) = val;
        if (ds.multilabel) {
            for (Index label : pl.labels)
                ds.labels(i, label) = 1.0;
        } else {
            ds.labels(i, 0) = pl.binary_label;
        }
    }
    return ds;
}

Dataset load_libsvm(const std::filesystem::path &path, const LibsvmOptions &opts) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open " + path.string());
    return parse_libsvm(in, opts);
}

void write_libsvm(std::ostream &out, const Dataset &ds) {
    std::ostringstream buf;
    buf.imbue(std::locale::classic());
    buf.precision(17);
    for (Index i = 0; i < ds.num_samples(); ++i) {
        bool need_space = true;
        if (ds.multilabel) {
            bool first = true;
            for (Index k = 0; k < ds.num_labels(); ++k) {
                if (ds.labels(i, k) > 0) {
                    buf << (first ? "" : ",") << k;
                    first = false;
                }
            }
            need_space = !first;
        } else {
            buf << (ds.labels(i, 0) > 0 ? "+1" : "-1");
        }
        for (Index j = 0; j < ds.num_features(); ++j) {
            if (ds.features(i, j) != 0) {
                buf << (need_space ? " " : "") << j + 1 << ':' << ds.features(i, j);
                need_space = true;
            }
        }
        buf << '\n';
    }
    out << buf.str();
}

void save_libsvm(const std::filesystem::path &path, const Dataset &ds) {
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot write " + path.string());
    write_libsvm(out, ds);
}

FeatureScaler FeatureScaler::fit(const Matrix &X) {
    FeatureScaler s;
    if (X.rows() == 0) {
        s.lo_ = s.hi_ = Vector::Zero(X.cols());
        return s;
    }
    s.lo_ = X.colwise().minCoeff().transpose();
    s.hi_ = X.colwise().maxCoeff().transpose();
    return s;
}

Matrix FeatureScaler::apply(const Matrix &X) const {
    if (X.cols() != lo_.size())
        throw std::invalid_argument("FeatureScaler: column count differs from the fitted data");
    Matrix out(X.rows(), X.cols());
    for (Index j = 0; j < X.cols(); ++j) {
        const double range = hi_(j) - lo_(j);
        if (range > 0)
            out.col(j) = (2.0 * (X.col(j).array() - lo_(j)) / range - 1.0).matrix();
        else
            out.col(j).setZero();
    }
    return out;
}

Dataset scale_features(const Dataset &ds) {
    Dataset out = ds;
    out.features = FeatureScaler::fit(ds.features).apply(ds.features);
    return out;
}

Dataset gen_example1(Index q, Index n, double p, double r, std::uint64_t seed) {
    if (q < 2 || n < 1)
        throw std::invalid_argument("gen_example1: need q >= 2 and n >= 1");
    if (!(p > 0 && p < 1) || !(r >= 0 && r < 1))
        throw std::invalid_argument("gen_example1: need p in (0,1) and r in [0,1)");
    // guard against p*q landing a hair above an integer
    const auto qp = static_cast<Index>(std::ceil(p * static_cast<double>(q) - 1e-9));
    const Index qm = q - qp;
    if (qp <= 0 || qm <= 0)
        throw std::invalid_argument("gen_example1: both classes must be nonempty");
    const auto flips = static_cast<Index>(std::floor(r * static_cast<double>(qp) + 1e-9));
    if (flips > qm)
        throw std::invalid_argument("gen_example1: more label flips than negative samples");

    Rng rng(seed);
    Vector mu1(n), mu2(n), sd1(n), sd2(n);
    for (Index j = 0; j < n; ++j) mu1(j) = rng.normal();
    for (Index j = 0; j < n; ++j) mu2(j) = rng.normal();
    for (Index j = 0; j < n; ++j) sd1(j) = std::sqrt(std::abs(rng.normal()));
    for (Index j = 0; j < n; ++j) sd2(j) = std::sqrt(std::abs(rng.normal()));

    Dataset ds;
    ds.features.resize(q, n);
    ds.labels.resize(q, 1);
    for (Index i = 0; i < q; ++i) {
        const bool pos = i < qp;
        const Vector &mu = pos ? mu1 : mu2;
        const Vector &sd = pos ? sd1 : sd2;
        for (Index j = 0; j < n; ++j)
            ds.features(i, j) = mu(j) + sd(j) * rng.normal();
        ds.labels(i, 0) = pos ? 1.0 : -1.0;
    }

    if (flips > 0) {
        std::vector<Index> pos_idx(static_cast<std::size_t>(qp)), neg_idx(static_cast<std::size_t>(qm));
        std::iota(pos_idx.begin(), pos_idx.end(), Index{0});
        std::iota(neg_idx.begin(), neg_idx.end(), qp);
        rng.shuffle(std::span<Index>(pos_idx));
        rng.shuffle(std::span<Index>(neg_idx));
        for (Index k = 0; k < flips; ++k) {
            ds.labels(pos_idx[static_cast<std::size_t>(k)], 0) = -1.0;
            ds.labels(neg_idx[static_cast<std::size_t>(k)], 0) = 1.0;
        }
    }
    return ds;
}

Dataset gen_example3(Index q, Index d, Index l, std::uint64_t seed, Matrix *W_out) {
    if (q < 1 || d < 1 || l < 1)
        throw std::invalid_argument("gen_example3: q, d and l must be positive");
    Rng rng(seed);
    Dataset ds;
    ds.multilabel = true;
    ds.features.resize(q, d);
    for (Index i = 0; i < q; ++i) {
        for (Index j = 0; j + 1 < d; ++j)
            ds.features(i, j) = rng.normal();
        ds.features(i, d - 1) = 1.0;
    }
    Matrix W(d, l);
    for (Index j = 0; j < d; ++j)
        for (Index k = 0; k < l; ++k)
            W(j, k) = rng.uniform(-1.0, 1.0);
    const Matrix scores = ds.features * W;
    ds.labels = (scores.array() > 0).select(Matrix::Ones(q, l), Matrix::Constant(q, l, -1.0));
    if (W_out)
        *W_out = std::move(W);
    return ds;
}

namespace {

// Class memberships used for stratification: the sign for binary data, the
// positive labels for multi-label data (with an extra class for samples that
// have none).
std::vector<std::vector<int>> sample_classes(const Dataset &ds, int &num_classes) {
    const Index q = ds.num_samples();
    std::vector<std::vector<int>> classes(static_cast<std::size_t>(q));
    if (!ds.multilabel) {
        num_classes = 2;
        for (Index i = 0; i < q; ++i)
            classes[static_cast<std::size_t>(i)] = {ds.labels(i, 0) > 0 ? 0 : 1};
        return classes;
    }
    const auto l = static_cast<int>(ds.num_labels());
    num_classes = l + 1;
    for (Index i = 0; i < q; ++i) {
        auto &c = classes[static_cast<std::size_t>(i)];
        for (int k = 0; k < l; ++k)
            if (ds.labels(i, k) > 0)
                c.push_back(k);
        if (c.empty())
            c.push_back(l);
    }
    return classes;
}

std::vector<std::vector<Index>> greedy_allocate(const Dataset &ds, const std::vector<double> &props,
                                                Rng &rng) {
    int num_classes = 0;
    const auto classes = sample_classes(ds, num_classes);
    const auto q = ds.num_samples();
    const auto F = props.size();

    std::vector<double> count(static_cast<std::size_t>(num_classes), 0.0);
    for (const auto &c : classes)
        for (int k : c)
            count[static_cast<std::size_t>(k)] += 1;

    std::vector<std::vector<double>> desired(F, std::vector<double>(count.size()));
    std::vector<double> desired_total(F);
    for (std::size_t f = 0; f < F; ++f) {
        for (std::size_t k = 0; k < count.size(); ++k)
            desired[f][k] = props[f] * count[k];
        desired_total[f] = props[f] * static_cast<double>(q);
    }

    std::vector<Index> order(static_cast<std::size_t>(q));
    std::iota(order.begin(), order.end(), Index{0});
    rng.shuffle(std::span<Index>(order));
    auto rarest = [&](Index i) {
        const auto &c = classes[static_cast<std::size_t>(i)];
        return *std::min_element(c.begin(), c.end(), [&](int a, int b) {
            return count[static_cast<std::size_t>(a)] < count[static_cast<std::size_t>(b)] ||
                   (count[static_cast<std::size_t>(a)] == count[static_cast<std::size_t>(b)] && a < b);
        });
    };
    std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
        return count[static_cast<std::size_t>(rarest(a))] < count[static_cast<std::size_t>(rarest(b))];
    });

    std::vector<std::vector<Index>> members(F);
    for (Index i : order) {
        const auto c = static_cast<std::size_t>(rarest(i));
        std::size_t best = 0;
        for (std::size_t f = 1; f < F; ++f) {
            if (desired[f][c] > desired[best][c] ||
                (desired[f][c] == desired[best][c] && desired_total[f] > desired_total[best]))
                best = f;
        }
        members[best].push_back(i);
        for (int k : classes[static_cast<std::size_t>(i)])
            desired[best][static_cast<std::size_t>(k)] -= 1;
        desired_total[best] -= 1;
    }
    for (auto &m : members)
        std::sort(m.begin(), m.end());
    return members;
}

std::vector<Index> complement(const std::vector<Index> &sorted, Index q) {
    std::vector<Index> out;
    out.reserve(static_cast<std::size_t>(q) - sorted.size());
    std::size_t k = 0;
    for (Index i = 0; i < q; ++i) {
        if (k < sorted.size() && sorted[k] == i)
            ++k;
        else
            out.push_back(i);
    }
    return out;
}

} // namespace

std::vector<Fold> make_folds(const Dataset &ds, const SplitSpec &spec,
                             std::vector<std::string> *warnings) {
    const Index q = ds.num_samples();
    Rng rng(spec.seed);
    std::vector<Fold> folds;

    if (spec.kind == SplitSpec::Kind::kfold) {
        if (spec.k < 2)
            throw std::invalid_argument("make_folds: k must be at least 2");
        if (q < spec.k)
            throw std::invalid_argument("make_folds: fewer samples than folds");
        std::vector<std::vector<Index>> tests;
        if (spec.stratified) {
            tests = greedy_allocate(ds, std::vector<double>(static_cast<std::size_t>(spec.k),
                                                            1.0 / spec.k),
                                    rng);
        } else {
            std::vector<Index> order(static_cast<std::size_t>(q));
            std::iota(order.begin(), order.end(), Index{0});
            rng.shuffle(std::span<Index>(order));
            for (int f = 0; f < spec.k; ++f) {
                const auto lo = static_cast<std::size_t>(f * q / spec.k);
                const auto hi = static_cast<std::size_t>((f + 1) * q / spec.k);
                std::vector<Index> t(order.begin() + static_cast<std::ptrdiff_t>(lo),
                                     order.begin() + static_cast<std::ptrdiff_t>(hi));
                std::sort(t.begin(), t.end());
                tests.push_back(std::move(t));
            }
        }
        for (auto &t : tests) {
            Fold fold;
            fold.train = complement(t, q);
            fold.test = std::move(t);
            folds.push_back(std::move(fold));
        }
    } else {
        if (!(spec.train_fraction > 0 && spec.train_fraction < 1))
            throw std::invalid_argument("make_folds: train fraction must lie in (0, 1)");
        std::vector<Index> train;
        if (spec.stratified) {
            train = greedy_allocate(ds, {spec.train_fraction, 1 - spec.train_fraction}, rng)[0];
        } else {
            std::vector<Index> order(static_cast<std::size_t>(q));
            std::iota(order.begin(), order.end(), Index{0});
            rng.shuffle(std::span<Index>(order));
            const auto ntrain =
                static_cast<std::size_t>(std::lround(spec.train_fraction * static_cast<double>(q)));
            train.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(ntrain));
            std::sort(train.begin(), train.end());
        }
        Fold fold;
        fold.test = complement(train, q);
        fold.train = std::move(train);
        folds.push_back(std::move(fold));
    }

    if (warnings && spec.stratified && !ds.multilabel) {
        const bool has_pos = (ds.labels.array() > 0).any();
        const bool has_neg = (ds.labels.array() < 0).any();
        for (std::size_t f = 0; f < folds.size(); ++f) {
            bool pos = false, neg = false;
            for (Index i : folds[f].test)
                (ds.labels(i, 0) > 0 ? pos : neg) = true;
            if ((has_pos && !pos) || (has_neg && !neg))
                warnings->push_back("fold " + std::to_string(f) +
                                    ": a class is absent from the test set");
        }
    }
    return folds;
}

} // namespace sgsn
