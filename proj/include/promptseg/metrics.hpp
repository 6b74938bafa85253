#pragma once

#include <cstdint>
#include <string>

#include "promptseg/lesion.hpp"
#include "promptseg/mask.hpp"

namespace promptseg {

struct ConfusionCounts {
    std::uint64_t tp = 0;
    std::uint64_t fp = 0;
    std::uint64_t fn = 0;
    std::uint64_t tn = 0;

    std::uint64_t total() const noexcept { return tp + fp + fn + tn; }
    bool operator==(const ConfusionCounts&) const = default;
};

// Throws DimensionMismatch.
ConfusionCounts confusion_counts(const BinaryMask& pred, const BinaryMask& gt);

// (tp+tn)/total. Throws InvalidArgument on an empty count.
double pixel_accuracy(const ConfusionCounts& c);
// tp/(tp+fp+fn); 1.0 when both masks are empty.
double iou(const ConfusionCounts& c);
// 2tp/(2tp+fp+fn); 1.0 when both masks are empty.
double dice(const ConfusionCounts& c);

struct MetricRecord {
    std::string image_id;
    LesionClass lesion_class = LesionClass::NV;
    double dice = 0.0;
    double iou = 0.0;
    double pixel_accuracy = 0.0;
    // Prediction or ground truth has no foreground; scores follow the empty-mask convention.
    bool degenerate = false;

    bool operator==(const MetricRecord&) const = default;
};

MetricRecord evaluate_pair(const BinaryMask& pred, const BinaryMask& gt, std::string image_id,
                           LesionClass lesion_class);

}  // namespace promptseg
