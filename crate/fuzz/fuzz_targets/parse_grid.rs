#![no_main]

use libfuzzer_sys::fuzz_target;

use iag::Grid;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(grid) = Grid::parse(text) {
        assert_eq!(Grid::parse(&grid.to_string()).unwrap(), grid);
    }
});
