#include "dmh/artifact.hpp"

#include <array>
#include <fstream>

#include "dmh/errors.hpp"
#include "io_detail.hpp"

namespace dmh {

namespace {

constexpr std::array<char, 4> kModelMagic{'D', 'M', 'H', 'M'};
constexpr std::uint32_t kModelVersion = 1;
constexpr std::uint32_t kMaxString = 1u << 16;

void put_string(std::ostream& out, const std::string& s) {
    io::detail::put_u32(out, static_cast<std::uint32_t>(s.size()));
    out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::string get_string(std::istream& in) {
    const std::uint32_t size = io::detail::get_u32(in);
    if (size > kMaxString) throw FormatError("string field too long");
    std::string s(size, '\0');
    in.read(s.data(), size);
    if (!in) throw FormatError("unexpected end of file");
    return s;
}

}  // namespace

std::size_t HashModel::find_view(const std::string& id) const {
    for (std::size_t i = 0; i < views.size(); ++i) {
        if (views[i].id == id) return i;
    }
    throw ContractViolation("model has no view '" + id + "'");
}

std::string model_variant(std::span<const ViewParams> params) {
    for (const auto& p : params) {
        if (p.gamma > 0.0) return "dmh";
    }
    return "dmh-no-mcr";
}

namespace io {

void save_model(const std::filesystem::path& path, const HashModel& model) {
    auto out = detail::open_out(path);
    detail::put_magic(out, kModelMagic);
    detail::put_u32(out, kModelVersion);
    detail::put_u32(out, static_cast<std::uint32_t>(model.code_length));
    put_string(out, model.variant);
    detail::put_f64(out, model.config.k_s);
    detail::put_f64(out, model.config.k_e);
    detail::put_u32(out, static_cast<std::uint32_t>(model.config.max_iter));
    detail::put_f64(out, model.config.convergence_rtol);
    detail::put_u64(out, model.config.seed);
    detail::put_u32(out, static_cast<std::uint32_t>(model.views.size()));
    for (const auto& view : model.views) {
        const ViewParams& p = view.params;
        if (p.W.cols() != model.code_length) {
            throw ContractViolation("view code length disagrees with model");
        }
        put_string(out, view.id);
        out.put(view.is_label_view ? 1 : 0);
        detail::put_u32(out, static_cast<std::uint32_t>(p.W.rows()));
        detail::put_u32(out, static_cast<std::uint32_t>(p.W.cols()));
        detail::put_f64(out, p.alpha);
        detail::put_f64(out, p.beta);
        detail::put_f64(out, p.gamma);
        detail::put_matrix_block(out, p.W);
        detail::put_matrix_block(out, p.v.transpose());
    }
    if (!out) throw FileError("failed writing '" + path.string() + "'");
}

HashModel load_model(const std::filesystem::path& path) {
    auto in = detail::open_in(path);
    HashModel model;
    try {
        detail::expect_magic(in, kModelMagic, "model file");
        const std::uint32_t version = detail::get_u32(in);
        if (version != kModelVersion) {
            throw FormatError("unsupported model version " +
                              std::to_string(version));
        }
        model.code_length = static_cast<int>(detail::get_u32(in));
        model.variant = get_string(in);
        model.config.k_s = detail::get_f64(in);
        model.config.k_e = detail::get_f64(in);
        model.config.max_iter = static_cast<int>(detail::get_u32(in));
        model.config.convergence_rtol = detail::get_f64(in);
        model.config.seed = detail::get_u64(in);
        const std::uint32_t count = detail::get_u32(in);
        for (std::uint32_t i = 0; i < count; ++i) {
            HashModel::View view;
            view.id = get_string(in);
            const int flag = in.get();
            if (!in) throw FormatError("unexpected end of file");
            view.is_label_view = flag != 0;
            const std::uint32_t d = detail::get_u32(in);
            const std::uint32_t c = detail::get_u32(in);
            view.params.alpha = detail::get_f64(in);
            view.params.beta = detail::get_f64(in);
            view.params.gamma = detail::get_f64(in);
            view.params.W = detail::get_matrix_block(in);
            const Matrix v = detail::get_matrix_block(in);
            if (view.params.W.rows() != d || view.params.W.cols() != c ||
                v.rows() != 1 || v.cols() != c ||
                static_cast<int>(c) != model.code_length) {
                throw FormatError("view '" + view.id + "' has inconsistent shapes");
            }
            view.params.v = v.row(0).transpose();
            view.params.validate();
            model.views.push_back(std::move(view));
        }
    } catch (const FormatError& e) {
        throw FormatError("'" + path.string() + "': " + e.what());
    } catch (const ConfigError& e) {
        throw FormatError("'" + path.string() + "': " + e.what());
    }
    detail::expect_eof(in, path);
    return model;
}

}  // namespace io

}  // namespace dmh
