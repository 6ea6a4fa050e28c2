#include "matsusy/errors.hpp"
#include "matsusy/scenario.hpp"

#include <fstream>
#include <iomanip>

namespace matsusy {

namespace {

std::ofstream open_output(const std::filesystem::path& file) {
    std::ofstream out(file);
    if (!out) throw IoError("cannot write " + file.string());
    out << std::setprecision(17);
    return out;
}

void write_spectrum(const RunReport& report, const std::filesystem::path& file) {
    auto out = open_output(file);
    out << "n,eigenvalue,ladder_prediction,abs_gap\n";
    for (const auto& r : report.spectrum_rows) {
        out << r.n << ',' << r.eigenvalue << ',' << r.ladder_prediction << ',' << r.abs_gap << '\n';
    }
}

void write_spinor(const GridSpinor& psi, const std::filesystem::path& file) {
    auto out = open_output(file);
    out << 'x';
    for (int c = 1; c <= psi.dimension(); ++c) out << ",re_psi_" << c << ",im_psi_" << c;
    out << '\n';
    for (int i = 0; i < psi.domain.npoints(); ++i) {
        out << psi.domain.x(i);
        for (int c = 0; c < psi.dimension(); ++c) out << ',' << psi.values(i, c).real() << ',' << psi.values(i, c).imag();
        out << '\n';
    }
}

}  // namespace

void emit(const RunReport& report, EmitFormat format, const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());

    {
        auto out = open_output(dir / "summary.json");
        out << report.summary().dump(2) << '\n';
        if (!out) throw IoError("failed writing summary.json");
    }
    if (format != EmitFormat::Csv) return;

    if (!report.spectrum_rows.empty()) write_spectrum(report, dir / "spectrum.csv");
    for (std::size_t j = 0; j < report.ground_states.size(); ++j) {
        write_spinor(report.ground_states[j], dir / ("groundstate_" + std::to_string(j + 1) + ".csv"));
    }
}

}  // namespace matsusy
