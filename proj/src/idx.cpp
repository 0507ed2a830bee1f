#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <vector>

#include "fedsim/dataset.hpp"
#include "fedsim/errors.hpp"

namespace fedsim {

namespace {

constexpr std::uint32_t kImagesMagic = 0x00000803;
constexpr std::uint32_t kLabelsMagic = 0x00000801;

std::string hex32(std::uint32_t v) {
    std::ostringstream os;
    os << "0x" << std::hex << std::setw(8) << std::setfill('0') << v;
    return os.str();
}

std::uint32_t read_be32(std::ifstream& in, const std::string& path) {
    unsigned char buf[4];
    if (!in.read(reinterpret_cast<char*>(buf), 4)) {
        throw io_error("truncated IDX file (header): " + path);
    }
    return (static_cast<std::uint32_t>(buf[0]) << 24) | (static_cast<std::uint32_t>(buf[1]) << 16) |
           (static_cast<std::uint32_t>(buf[2]) << 8) | static_cast<std::uint32_t>(buf[3]);
}

std::vector<unsigned char> read_payload(std::ifstream& in, std::size_t count, const std::string& path) {
    std::vector<unsigned char> bytes(count);
    if (!in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(count))) {
        throw io_error("truncated IDX file (payload): " + path);
    }
    return bytes;
}

}  // namespace

Dataset load_idx(const std::string& images_path, const std::string& labels_path) {
    std::ifstream img(images_path, std::ios::binary);
    if (!img) throw io_error("cannot open IDX image file: " + images_path);
    const std::uint32_t img_magic = read_be32(img, images_path);
    if (img_magic != kImagesMagic) {
        throw io_error("bad IDX image magic in " + images_path + ": expected " + hex32(kImagesMagic) +
                       ", found " + hex32(img_magic));
    }
    const std::uint32_t n_images = read_be32(img, images_path);
    const std::uint32_t rows = read_be32(img, images_path);
    const std::uint32_t cols = read_be32(img, images_path);
    if (n_images == 0 || rows == 0 || cols == 0) {
        throw io_error("empty IDX image file: " + images_path);
    }

    std::ifstream lab(labels_path, std::ios::binary);
    if (!lab) throw io_error("cannot open IDX label file: " + labels_path);
    const std::uint32_t lab_magic = read_be32(lab, labels_path);
    if (lab_magic != kLabelsMagic) {
        throw io_error("bad IDX label magic in " + labels_path + ": expected " + hex32(kLabelsMagic) +
                       ", found " + hex32(lab_magic));
    }
    const std::uint32_t n_labels = read_be32(lab, labels_path);
    if (n_labels != n_images) {
        throw io_error("IDX count mismatch: " + images_path + " has " + std::to_string(n_images) +
                       " images but " + labels_path + " has " + std::to_string(n_labels) + " labels");
    }

    const std::size_t d = static_cast<std::size_t>(rows) * cols;
    const auto pixels = read_payload(img, static_cast<std::size_t>(n_images) * d, images_path);
    const auto labels = read_payload(lab, n_labels, labels_path);

    Dataset data;
    data.n = static_cast<int>(n_images);
    data.d = static_cast<int>(d);
    data.inputs.resize(pixels.size());
    std::transform(pixels.begin(), pixels.end(), data.inputs.begin(),
                   [](unsigned char b) { return b / 255.0; });
    data.labels.resize(labels.size());
    int max_label = 0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        data.labels[i] = labels[i];
        max_label = std::max(max_label, data.labels[i]);
    }
    data.n_classes = max_label + 1;
    return data;
}

}  // namespace fedsim
