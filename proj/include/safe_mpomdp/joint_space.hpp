#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace safe_mpomdp {

/// Mixed-radix encoding of per-agent indices into one dense index.
/// Agent 0 is the most significant digit.
class MixedRadix {
public:
    MixedRadix() = default;
    explicit MixedRadix(std::vector<std::size_t> radices) : radices_(std::move(radices)) {
        size_ = radices_.empty() ? 0 : 1;
        for (std::size_t r : radices_) {
            if (r == 0) throw std::invalid_argument("MixedRadix: empty component");
            size_ *= r;
        }
    }

    std::size_t digits() const { return radices_.size(); }
    std::size_t size() const { return size_; }
    const std::vector<std::size_t>& radices() const { return radices_; }

    std::size_t encode(std::span<const std::size_t> parts) const {
        if (parts.size() != radices_.size()) throw std::invalid_argument("MixedRadix: wrong arity");
        std::size_t index = 0;
        for (std::size_t i = 0; i < parts.size(); ++i) {
            if (parts[i] >= radices_[i]) throw std::out_of_range("MixedRadix: digit out of range");
            index = index * radices_[i] + parts[i];
        }
        return index;
    }

    std::vector<std::size_t> decode(std::size_t index) const {
        if (index >= size_) throw std::out_of_range("MixedRadix: index out of range");
        std::vector<std::size_t> parts(radices_.size());
        for (std::size_t i = radices_.size(); i-- > 0;) {
            parts[i] = index % radices_[i];
            index /= radices_[i];
        }
        return parts;
    }

    bool operator==(const MixedRadix&) const = default;

private:
    std::vector<std::size_t> radices_;
    std::size_t size_ = 0;
};

// A joint index together with its per-agent digits. Tag keeps actions and
// observations from being mixed up.
template <class Tag>
struct JointIndex {
    std::size_t index = 0;
    std::vector<std::size_t> parts;

    static JointIndex from_index(const MixedRadix& space, std::size_t index) {
        return JointIndex{index, space.decode(index)};
    }
    static JointIndex from_parts(const MixedRadix& space, std::vector<std::size_t> parts) {
        const std::size_t index = space.encode(parts);
        return JointIndex{index, std::move(parts)};
    }

    bool operator==(const JointIndex& other) const { return index == other.index; }
};

struct ActionTag {};
struct ObservationTag {};

using JointAction = JointIndex<ActionTag>;
using JointObservation = JointIndex<ObservationTag>;

inline std::vector<JointAction> enumerate(const MixedRadix& space) {
    std::vector<JointAction> out;
    out.reserve(space.size());
    for (std::size_t i = 0; i < space.size(); ++i) out.push_back(JointAction::from_index(space, i));
    return out;
}

}  // namespace safe_mpomdp
