#include "patternforge/descriptors.hpp"
#include "patternforge/parallel.hpp"

namespace patternforge {

Descriptors describe_images(std::span<const ImageRef> images, std::size_t workers) {
  Descriptors set;
  set.ids.reserve(images.size());
  for (const auto& ref : images) set.ids.push_back(ref.id);
  set.vectors.resize(static_cast<Eigen::Index>(images.size()), kThumbnailDim);
  parallel_for(images.size(), workers, [&](std::size_t i) {
    set.vectors.row(static_cast<Eigen::Index>(i)) = thumbnail_descriptor<float>(read_image(images[i].path)).transpose();
  });
  validate(set);
  return set;
}

}  // namespace patternforge
