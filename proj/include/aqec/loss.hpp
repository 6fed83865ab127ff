#pragma once

#include <string>

namespace aqec {

// Centroid-separation losses. All are functions of the Hilbert-Schmidt
// distances between per-class averaged density matrices; the ratio loss
// additionally involves each sample's distance to its own centroid.
enum class LossKind {
    BinaryNegDistance,  // -D_12, exactly two classes
    NegProduct,         // -prod_{i<j} D_ij
    NegSum,             // -sum_{i<j} D_ij
    NegMinOverSpread,   // -D_min / r_max
};

std::string to_string(LossKind k);
LossKind loss_kind_from_string(const std::string& s);

}  // namespace aqec
