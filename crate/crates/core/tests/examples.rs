macro_rules! example {
    ($name:ident) => {
        mod $name {
            include!(concat!("../examples/", stringify!($name), ".rs"));

            #[test]
            fn runs() {
                let lines = run_example().unwrap();
                assert!(!lines.is_empty());
            }
        }
    };
}

example!(metric_basics);
example!(tree_homs);
example!(back_and_forth);
example!(parity_families);
example!(slalom_capture);
example!(image_width);
example!(forcing_conditions);
