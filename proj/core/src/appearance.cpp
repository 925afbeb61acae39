#include <spinetrack/appearance.hpp>

#include <algorithm>
#include <cmath>

namespace spinetrack {

namespace {

double squared_l2(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size())
        throw Error("embedding dimension mismatch: " + std::to_string(a.size()) + " vs " +
                    std::to_string(b.size()));
    double sum = 0.0;
    for (size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        sum += d * d;
    }
    return sum;
}

}  // namespace

double contrastive_loss(std::span<const double> v_i, std::span<const double> v_j,
                        bool same_label, double margin) {
    if (!(margin > 0)) throw Error("contrastive_loss: margin must be positive");
    const double d2 = squared_l2(v_i, v_j);
    if (same_label) return d2;
    const double hinge = std::max(0.0, margin - d2);
    return hinge * hinge;
}

double appearance_cost(std::span<const double> a, std::span<const double> b) {
    return std::sqrt(squared_l2(a, b));
}

Embedding mean_embedding(const std::vector<Embedding>& vectors, bool* zero_mean_flag) {
    if (vectors.empty()) throw Error("mean_embedding: empty list");
    const size_t d = vectors.front().size();
    Embedding mean(d, 0.0);
    for (const auto& v : vectors) {
        if (v.size() != d) throw Error("mean_embedding: ragged dimensions");
        for (size_t i = 0; i < d; ++i) mean[i] += v[i];
    }
    for (auto& x : mean) x /= static_cast<double>(vectors.size());

    double norm = 0.0;
    for (double x : mean) norm += x * x;
    norm = std::sqrt(norm);
    if (norm == 0.0) {
        if (zero_mean_flag != nullptr) *zero_mean_flag = true;
        return vectors.front();
    }
    if (zero_mean_flag != nullptr) *zero_mean_flag = false;
    for (auto& x : mean) x /= norm;
    return mean;
}

void EmbeddingStore::insert(const std::string& detection_id, Embedding vec) {
    if (vec.empty()) throw Error("EmbeddingStore: empty vector for '" + detection_id + "'");
    for (double x : vec)
        if (!std::isfinite(x)) throw Error("EmbeddingStore: non-finite value for '" + detection_id + "'");
    if (dim_ == 0) dim_ = static_cast<int>(vec.size());
    if (static_cast<int>(vec.size()) != dim_)
        throw Error("EmbeddingStore: dimension of '" + detection_id + "' is " +
                    std::to_string(vec.size()) + ", expected " + std::to_string(dim_));
    if (!table_.emplace(detection_id, std::move(vec)).second)
        throw Error("EmbeddingStore: duplicate id '" + detection_id + "'");
}

const Embedding* EmbeddingStore::find(const std::string& detection_id) const {
    auto it = table_.find(detection_id);
    return it == table_.end() ? nullptr : &it->second;
}

void EmbeddingStore::normalize() {
    for (auto& [id, vec] : table_) {
        double norm = 0.0;
        for (double x : vec) norm += x * x;
        norm = std::sqrt(norm);
        if (norm == 0.0) throw Error("EmbeddingStore: zero vector for '" + id + "'");
        for (auto& x : vec) x /= norm;
    }
}

}  // namespace spinetrack
