#include "tjflow/grid.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "tjflow/errors.hpp"
#include "tjflow/text.hpp"

namespace tjflow {

double bilinear_sample(const GridField& field, Vec2 p) {
    if (!field.in_bounds(p))
        throw ValidationError("bilinear_sample: point outside field bounds");
    // Continuous cell-center coordinates; clamp so boundary points use the
    // outermost cell pair.
    const double fx = (p.x - field.x0) / field.h - 0.5;
    const double fy = (p.y - field.y0) / field.h - 0.5;
    const int ix = std::clamp(static_cast<int>(std::floor(fx)), 0, field.nx - 2 >= 0 ? field.nx - 2 : 0);
    const int iy = std::clamp(static_cast<int>(std::floor(fy)), 0, field.ny - 2 >= 0 ? field.ny - 2 : 0);
    const int ix1 = std::min(ix + 1, field.nx - 1);
    const int iy1 = std::min(iy + 1, field.ny - 1);
    const double tx = std::clamp(fx - ix, 0.0, 1.0);
    const double ty = std::clamp(fy - iy, 0.0, 1.0);
    const double v00 = field.at(ix, iy), v10 = field.at(ix1, iy);
    const double v01 = field.at(ix, iy1), v11 = field.at(ix1, iy1);
    if (std::isinf(v00) || std::isinf(v10) || std::isinf(v01) || std::isinf(v11))
        return kInf;
    const double a = v00 + tx * (v10 - v00);
    const double b = v01 + tx * (v11 - v01);
    return a + ty * (b - a);
}

void write_grid_csv(std::ostream& out, const GridField& field) {
    out << "# " << field.nx << ' ' << field.ny << ' ' << format_double(field.h)
        << ' ' << format_double(field.x0) << ' ' << format_double(field.y0) << '\n';
    for (int iy = 0; iy < field.ny; ++iy) {
        for (int ix = 0; ix < field.nx; ++ix) {
            if (ix) out << ',';
            const double v = field.at(ix, iy);
            out << (std::isinf(v) ? std::string("inf") : format_double(v));
        }
        out << '\n';
    }
}

GridField read_grid_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line.size() < 2 || line[0] != '#')
        throw ParseError("missing grid header", 1);
    std::istringstream hs(line.substr(1));
    GridField f;
    if (!(hs >> f.nx >> f.ny >> f.h >> f.x0 >> f.y0))
        throw ParseError("malformed grid header", 1);
    f.values.assign(static_cast<std::size_t>(f.nx) * f.ny, 0.0);
    long line_no = 1;
    for (int iy = 0; iy < f.ny; ++iy) {
        if (!std::getline(in, line)) throw ParseError("unexpected end of grid", line_no + 1);
        ++line_no;
        std::string_view sv(line);
        for (int ix = 0; ix < f.nx; ++ix) {
            const std::size_t comma = sv.find(',');
            std::string_view tok = trim(sv.substr(0, comma));
            f.at(ix, iy) = (tok == "inf") ? kInf : parse_double(tok, line_no);
            if (comma == std::string_view::npos) {
                if (ix != f.nx - 1) throw ParseError("short grid row", line_no);
                break;
            }
            sv.remove_prefix(comma + 1);
        }
    }
    return f;
}

} // namespace tjflow
