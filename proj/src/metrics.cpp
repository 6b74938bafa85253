#include "promptseg/metrics.hpp"

#include "promptseg/error.hpp"

namespace promptseg {

ConfusionCounts confusion_counts(const BinaryMask& pred, const BinaryMask& gt) {
    if (pred.width() != gt.width() || pred.height() != gt.height()) {
        throw DimensionMismatch("prediction is " + std::to_string(pred.width()) + "x" +
                                std::to_string(pred.height()) + ", ground truth is " +
                                std::to_string(gt.width()) + "x" + std::to_string(gt.height()));
    }
    // Index by (pred << 1 | gt): 0 tn, 1 fn, 2 fp, 3 tp.
    std::uint64_t bins[4] = {0, 0, 0, 0};
    const auto p = pred.data();
    const auto g = gt.data();
    for (std::size_t i = 0; i < p.size(); ++i) ++bins[(p[i] << 1) | g[i]];
    return {bins[3], bins[2], bins[1], bins[0]};
}

double pixel_accuracy(const ConfusionCounts& c) {
    const std::uint64_t total = c.total();
    if (total == 0) throw InvalidArgument("pixel accuracy of an empty image");
    return static_cast<double>(c.tp + c.tn) / static_cast<double>(total);
}

double iou(const ConfusionCounts& c) {
    const std::uint64_t uni = c.tp + c.fp + c.fn;
    if (uni == 0) return 1.0;
    return static_cast<double>(c.tp) / static_cast<double>(uni);
}

double dice(const ConfusionCounts& c) {
    const std::uint64_t denom = 2 * c.tp + c.fp + c.fn;
    if (denom == 0) return 1.0;
    return static_cast<double>(2 * c.tp) / static_cast<double>(denom);
}

MetricRecord evaluate_pair(const BinaryMask& pred, const BinaryMask& gt, std::string image_id,
                           LesionClass lesion_class) {
    const ConfusionCounts c = confusion_counts(pred, gt);
    MetricRecord r;
    r.image_id = std::move(image_id);
    r.lesion_class = lesion_class;
    r.dice = dice(c);
    r.iou = iou(c);
    r.pixel_accuracy = pixel_accuracy(c);
    r.degenerate = (c.tp + c.fp == 0) || (c.tp + c.fn == 0);
    return r;
}

}  // namespace promptseg
