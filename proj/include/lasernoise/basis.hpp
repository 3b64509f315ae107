#pragma once

namespace lasernoise {

// Index map of the 26 collective variables (fluctuations and mean values use
// the same ordering).  Labels: field circular components of modes a and b,
// their adjoints, the three region polarizations per spin branch with
// adjoints, and the three region population differences per spin branch.
//
//   0  da+      1  da-      2  db+      3  db-
//   4  da+^     5  da-^     6  db+^     7  db-^
//   8  dP+      9  dP-     10  dQ+     11  dQ-     12  dXi+    13  dXi-
//  14  dP+^    15  dP-^    16  dQ+^    17  dQ-^    18  dXi+^   19  dXi-^
//  20  dM2+    21  dM2-    22  dN2+    23  dN2-    24  dL2+    25  dL2-
enum BasisIndex : int {
    IdxAp = 0, IdxAm, IdxBp, IdxBm,
    IdxApD, IdxAmD, IdxBpD, IdxBmD,
    IdxPp, IdxPm, IdxQp, IdxQm, IdxXip, IdxXim,
    IdxPpD, IdxPmD, IdxQpD, IdxQmD, IdxXipD, IdxXimD,
    IdxM2p, IdxM2m, IdxN2p, IdxN2m, IdxL2p, IdxL2m,
};

inline constexpr int kFullDim = 26;

// Conjugate-pair map: fields 0..3 <-> 4..7, polarizations 8..13 <-> 14..19,
// population differences 20..25 are self-conjugate.
inline constexpr int conjugate_index(int i)
{
    if (i < 4) return i + 4;
    if (i < 8) return i - 4;
    if (i < 14) return i + 6;
    if (i < 20) return i - 6;
    return i;
}

} // namespace lasernoise
