#pragma once

#include <spinetrack/error.hpp>

#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace spinetrack {

using Embedding = std::vector<double>;

/// Reference contrastive loss for a pair of embeddings: squared L2 distance
/// for same-identity pairs; for different identities the margin hinge
/// max(0, margin - squaredL2) is squared again.
double contrastive_loss(std::span<const double> v_i, std::span<const double> v_j,
                        bool same_label, double margin);

/// Euclidean distance between embeddings. Bounded by 2 for unit vectors.
double appearance_cost(std::span<const double> a, std::span<const double> b);

/// Arithmetic mean renormalized to unit length. A zero-length mean is
/// reported through `zero_mean_flag` and falls back to the first member.
Embedding mean_embedding(const std::vector<Embedding>& vectors,
                         bool* zero_mean_flag = nullptr);

/// Read-only embedding table keyed by detection id. All vectors share one
/// dimension; load-time normalization (on by default) projects them onto
/// the unit sphere so appearance costs stay in [0,2].
class EmbeddingStore {
public:
    EmbeddingStore() = default;

    /// Throws Error on a dimension mismatch or duplicate id.
    void insert(const std::string& detection_id, Embedding vec);

    const Embedding* find(const std::string& detection_id) const;
    size_t size() const { return table_.size(); }
    bool empty() const { return table_.empty(); }
    int dim() const { return dim_; }

    /// Scales every stored vector to unit L2 norm. Zero vectors are rejected.
    void normalize();

private:
    int dim_ = 0;
    std::unordered_map<std::string, Embedding> table_;
};

}  // namespace spinetrack
