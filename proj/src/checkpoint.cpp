#include "lutforge/checkpoint.hpp"

#include <cstring>
#include <fstream>
#include <stdexcept>

namespace lutforge {

namespace {

class Writer {
public:
    Writer(const std::filesystem::path& path) : out_(path, std::ios::binary), path_(path) {
        if (!out_) throw std::runtime_error(path.string() + ": cannot open for writing");
    }
    void u32(std::uint32_t v) { raw(&v, 4); }
    void f32(double v) {
        float f = static_cast<float>(v);
        raw(&f, 4);
    }
    void tensor(std::span<const double> t) {
        for (double v : t) f32(v);
    }
    void raw(const void* p, size_t n) {
        out_.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
        if (!out_) throw std::runtime_error(path_.string() + ": write failure");
    }

private:
    std::ofstream out_;
    std::filesystem::path path_;
};

class Reader {
public:
    Reader(const std::filesystem::path& path) : in_(path, std::ios::binary), path_(path) {
        if (!in_) throw std::runtime_error(path.string() + ": cannot open");
    }
    std::uint32_t u32() {
        std::uint32_t v;
        raw(&v, 4);
        return v;
    }
    double f32() {
        float f;
        raw(&f, 4);
        return static_cast<double>(f);
    }
    void tensor(std::span<double> t) {
        for (double& v : t) v = f32();
    }
    void raw(void* p, size_t n) {
        in_.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
        if (static_cast<size_t>(in_.gcount()) != n)
            throw std::runtime_error(path_.string() + ": truncated at byte offset " +
                                     std::to_string(offset_ + in_.gcount()));
        offset_ += n;
    }
    size_t offset() const { return offset_; }
    bool at_end() {
        return in_.peek() == std::ifstream::traits_type::eof();
    }

private:
    std::ifstream in_;
    std::filesystem::path path_;
    size_t offset_ = 0;
};

}  // namespace

void write_checkpoint(const AdaptiveModel& model, const std::filesystem::path& path,
                      const AdamState* adam) {
    if (model.luts.empty()) throw std::runtime_error("cannot checkpoint an empty model");
    Writer w(path);
    w.raw(kCheckpointMagic, 8);
    w.u32(kCheckpointVersion);
    w.u32(static_cast<std::uint32_t>(model.lattice()));
    w.u32(static_cast<std::uint32_t>(model.lut_count()));
    std::uint32_t flags = 0;
    if (model.predictor) flags |= 1u;
    if (adam) flags |= 2u;
    w.u32(flags);
    const auto tensors = parameter_tensors(model);
    for (const auto& t : tensors) w.tensor(t);
    if (adam) {
        if (adam->m.size() != tensors.size())
            throw std::runtime_error("adam state does not match model shape");
        w.u32(static_cast<std::uint32_t>(adam->step));
        for (size_t i = 0; i < tensors.size(); ++i) {
            w.tensor(adam->m[i]);
            w.tensor(adam->v[i]);
        }
    }
}

LoadedCheckpoint read_checkpoint(const std::filesystem::path& path) {
    Reader r(path);
    char magic[8];
    r.raw(magic, 8);
    if (std::memcmp(magic, kCheckpointMagic, 8) != 0)
        throw std::runtime_error(path.string() + ": bad magic");
    const std::uint32_t version = r.u32();
    if (version != kCheckpointVersion)
        throw std::runtime_error(path.string() + ": unsupported version " +
                                 std::to_string(version));
    const std::uint32_t m = r.u32();
    const std::uint32_t n = r.u32();
    const std::uint32_t flags = r.u32();
    if (m < 2 || n < 1) throw std::runtime_error(path.string() + ": bad header dimensions");

    LoadedCheckpoint loaded;
    loaded.model.luts.assign(n, Lut3D(static_cast<int>(m)));
    if (flags & 1u) {
        PredictorParams p;
        p.num_outputs = static_cast<int>(n);
        for (int b = 0; b < 5; ++b)
            p.blocks[b] = ConvBlockParams(PredictorParams::kChannelPlan[b],
                                          PredictorParams::kChannelPlan[b + 1]);
        const int head = PredictorParams::kChannelPlan[5] * PredictorParams::kHeadSpatial *
                         PredictorParams::kHeadSpatial;
        p.fc_kernel.assign(static_cast<size_t>(n) * head, 0.0);
        p.fc_bias.assign(n, 0.0);
        loaded.model.predictor = std::move(p);
    }
    auto tensors = parameter_tensors(loaded.model);
    for (auto& t : tensors) r.tensor(t);
    if (!loaded.model.finite())
        throw std::runtime_error(path.string() + ": non-finite parameters");
    if (flags & 2u) {
        AdamState adam = AdamState::for_model(loaded.model);
        adam.step = static_cast<long>(r.u32());
        for (size_t i = 0; i < tensors.size(); ++i) {
            r.tensor(adam.m[i]);
            r.tensor(adam.v[i]);
        }
        loaded.adam = std::move(adam);
    }
    if (!r.at_end())
        throw std::runtime_error(path.string() + ": trailing bytes after offset " +
                                 std::to_string(r.offset()));
    return loaded;
}

}  // namespace lutforge
